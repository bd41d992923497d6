use thiserror::Error;

/// Errors raised by group, order, compression and bound operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group order {0} exceeds the supported index width")]
    GroupTooLarge(u128),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("set is empty")]
    EmptySet,

    #[error("direction must be non-zero")]
    ZeroDirection,

    #[error("set is not a subgroup")]
    NotSubgroup,

    #[error("set does not affinely span the whole group")]
    NotSpanning,

    #[error("set must contain the identity")]
    MissingZero,

    #[error("no subset of the set maps onto the standard basis by an automorphism")]
    NoCompatibleBasis,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: u64, limit: u64 },

    #[error("requested {requested} elements from a set of size {available}")]
    SizeExceedsSet { requested: usize, available: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("operands belong to different groups")]
    GroupMismatch,

    #[error("set does not contain the affine basis {{0, e_1, ..., e_n}}")]
    MissingBasis,

    #[error("operation requires ascending exponents m_1 <= ... <= m_n")]
    AscendingRequired,

    #[error("element with last coordinate outside 0..p-1")]
    LastCoordinateOutOfRange,

    #[error("operation requires at least two coordinates")]
    RankTooSmall,

    #[error("set is not (e_n - v)-compressed for v = {direction:?}")]
    PreconditionNotCompressed { direction: Vec<u64> },

    #[error("sweep needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
