//! Exact additive combinatorics in finite abelian p-groups
//! `G = Z/p^{m_1} ⊕ ... ⊕ Z/p^{m_n}`.
//!
//! Elements are addressed by a dense mixed-radix index with the first
//! coordinate least significant. Subsets are bitsets over that index.

pub mod bounds;
pub mod compression;
pub mod error;
pub mod group;
pub mod order;
pub mod setfile;
pub mod span;
pub mod subset;
pub mod sumset;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Group, GroupElement, GroupSpec};
pub use order::OrderKind;
pub use subset::GroupSubset;
pub use sumset::Rational;
