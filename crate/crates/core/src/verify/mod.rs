//! Exhaustive and sampled property sweeps over subsets of small groups, and
//! the empirical (doubling, spanning) frontier.
//!
//! Subsets are enumerated by ascending bitmask. Filters force some bits on
//! and others off; the `k`-th candidate deposits the bits of `k` into the
//! free positions, so ascending `k` is ascending mask. A failing sweep
//! reports the candidate with the smallest `k` (exhaustive) or the smallest
//! sample counter (sampled), independent of the worker count.

mod oracle;
mod properties;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::DEFAULT_K0;
use crate::compression::basis_set;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::span::span_size_mask;
use crate::subset::GroupSubset;
use crate::sumset::{cyclic_sumset_mask, kneser_lower_bound, sumset_mask, Rational};

pub use oracle::{oracle_is_sumset, oracle_natural_is_sumset, oracle_sumset_naive};
pub use properties::{find_property, properties, Property, PropertyKind, SubsetCheck};

/// Default cap on subset evaluations per sweep.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Which subsets a sweep visits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Filter {
    pub contains_zero: bool,
    pub contains_basis: bool,
    /// Every last coordinate in `0..p`.
    pub layer_restricted: bool,
}

impl Filter {
    pub const ALL: Filter = Filter {
        contains_zero: false,
        contains_basis: false,
        layer_restricted: false,
    };
    pub const ZERO: Filter = Filter {
        contains_zero: true,
        ..Filter::ALL
    };
    pub const BASIS: Filter = Filter {
        contains_basis: true,
        ..Filter::ALL
    };
    pub const LAYER: Filter = Filter {
        layer_restricted: true,
        ..Filter::ALL
    };
    pub const BASIS_LAYER: Filter = Filter {
        contains_basis: true,
        layer_restricted: true,
        ..Filter::ALL
    };

    /// Forced and permitted index masks.
    fn masks(&self, group: &Group) -> Result<(u64, u64)> {
        let n = group.order();
        let mut allowed = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut forced = 0u64;
        if self.contains_zero {
            forced |= 1;
        }
        if self.contains_basis {
            forced |= basis_set(group).mask().unwrap();
        }
        if self.layer_restricted {
            if group.rank() < 2 {
                return Err(Error::RankTooSmall);
            }
            let limit = group.prime() as usize * group.weight(group.rank() - 1);
            if limit < 64 {
                allowed &= (1u64 << limit) - 1;
            }
        }
        Ok((forced, allowed))
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.contains_zero {
            parts.push("contains-zero");
        }
        if self.contains_basis {
            parts.push("contains-basis");
        }
        if self.layer_restricted {
            parts.push("layer-restricted");
        }
        if parts.is_empty() {
            f.write_str("all")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

impl FromStr for Filter {
    type Err = Error;

    /// `all`, or `+`-joined names among `contains-zero`, `contains-basis`,
    /// `layer-restricted` (short forms `zero`, `basis`, `layer`).
    fn from_str(s: &str) -> Result<Self> {
        let mut f = Filter::ALL;
        for part in s.split('+').map(str::trim) {
            match part {
                "all" => {}
                "contains-zero" | "zero" => f.contains_zero = true,
                "contains-basis" | "basis" => f.contains_basis = true,
                "layer-restricted" | "layer" => f.layer_restricted = true,
                _ => return Err(Error::Parse(format!("unknown filter `{part}`"))),
            }
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => f.write_str("exhaustive"),
            Mode::Sampled { count, seed } => write!(f, "sampled count={count} seed={seed}"),
        }
    }
}

/// Runtime knobs shared by sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub budget: u64,
    /// `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Sets with doubling at most `k0` are exempt from the main bound.
    pub k0: Rational,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            budget: DEFAULT_BUDGET,
            workers: None,
            k0: Rational::from_integer(DEFAULT_K0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub group: Group,
    pub mode: Mode,
    /// `None` selects the property's default filter.
    pub filter: Option<Filter>,
    pub property: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Candidate number `k` or sample counter.
    pub index: u64,
    pub set: Option<GroupSubset>,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass { checked: u64 },
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Everything a per-subset check may consult.
pub struct SweepContext {
    pub group: Group,
    pub basis: GroupSubset,
    pub k0: Rational,
}

impl SweepContext {
    pub fn new(group: &Group, config: &SweepConfig) -> Self {
        SweepContext {
            group: group.clone(),
            basis: basis_set(group),
            k0: config.k0,
        }
    }
}

/// Maps candidate numbers onto subset masks.
#[derive(Clone, Debug)]
pub struct SubsetSpace {
    forced: u64,
    free: Vec<u8>,
}

impl SubsetSpace {
    pub fn new(group: &Group, filter: Filter) -> Result<Self> {
        if group.order() > 64 {
            return Err(Error::OutOfRange(format!(
                "subset sweeps need a group of order at most 64, got {}",
                group.order()
            )));
        }
        let (forced, allowed) = filter.masks(group)?;
        let free_mask = allowed & !forced;
        let free = (0..64u8).filter(|&b| free_mask >> b & 1 == 1).collect();
        Ok(SubsetSpace { forced, free })
    }

    pub fn free_bits(&self) -> u32 {
        self.free.len() as u32
    }

    /// Number of candidates, `2^free`.
    pub fn size(&self) -> u128 {
        1u128 << self.free.len()
    }

    #[inline]
    pub fn mask(&self, mut k: u64) -> u64 {
        let mut m = self.forced;
        let mut j = 0;
        while k != 0 {
            if k & 1 == 1 {
                m |= 1 << self.free[j];
            }
            k >>= 1;
            j += 1;
        }
        m
    }

    /// Candidate number of the `i`-th sample for `seed`.
    pub fn sample(&self, seed: u64, i: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let x: u64 = rng.gen();
        match self.free.len() {
            64 => x,
            b => x & ((1u64 << b) - 1),
        }
    }
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs a per-subset check over the candidates selected by `mode`.
pub fn sweep_subsets(
    group: &Group,
    mode: Mode,
    filter: Filter,
    check: SubsetCheck,
    config: &SweepConfig,
) -> Result<Verdict> {
    let space = SubsetSpace::new(group, filter)?;
    let count = match mode {
        Mode::Exhaustive => {
            if space.size() > config.budget as u128 {
                return Err(Error::BudgetExceeded {
                    needed: space.size(),
                    budget: config.budget,
                });
            }
            space.size() as u64
        }
        Mode::Sampled { count, .. } => {
            if count > config.budget {
                return Err(Error::BudgetExceeded {
                    needed: count as u128,
                    budget: config.budget,
                });
            }
            count
        }
    };
    let ctx = SweepContext::new(group, config);
    let found = in_pool(config.workers, || {
        (0..count).into_par_iter().find_map_first(|i| {
            let k = match mode {
                Mode::Exhaustive => i,
                Mode::Sampled { seed, .. } => space.sample(seed, i),
            };
            let m = space.mask(k);
            if m == 0 {
                return None;
            }
            let a = GroupSubset::from_mask(group, m);
            match check(&ctx, &a) {
                Ok(None) => None,
                Ok(Some(details)) => Some(Ok(Counterexample {
                    index: i,
                    set: Some(a),
                    details,
                })),
                Err(e) => Some(Err(e)),
            }
        })
    })?;
    match found {
        None => Ok(Verdict::Pass { checked: count }),
        Some(r) => r.map(Verdict::Counterexample),
    }
}

/// Runs the registered property named in `spec`.
pub fn sweep(spec: &SweepSpec, config: &SweepConfig) -> Result<Verdict> {
    let prop = find_property(&spec.property)?;
    match prop.kind {
        PropertyKind::Subsets { check, default_filter } => sweep_subsets(
            &spec.group,
            spec.mode,
            spec.filter.unwrap_or(default_filter),
            check,
            config,
        ),
        PropertyKind::Whole(run) => run(&spec.group, config),
    }
}

/// Checks `|R + S| >= kneser_lower_bound(|R|, |S|, r)` for every pair of
/// non-empty `R, S ⊆ Z/rZ`.
pub fn kneser_sweep(r: u32, config: &SweepConfig) -> Result<Verdict> {
    if !(1..=32).contains(&r) {
        return Err(Error::OutOfRange(format!("modulus {r} outside 1..=32")));
    }
    let sets = (1u64 << r) - 1;
    let needed = sets as u128 * sets as u128;
    if needed > config.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: config.budget,
        });
    }
    let r64 = r as u64;
    let lower: Vec<Vec<u64>> = (0..=r64)
        .map(|x| {
            (0..=r64)
                .map(|y| if x == 0 || y == 0 { 0 } else { kneser_lower_bound(x, y, r64).unwrap() })
                .collect()
        })
        .collect();
    let found = in_pool(config.workers, || {
        (1..=sets).into_par_iter().find_map_first(|rm| {
            let rs = rm.count_ones() as usize;
            (1..=sets).find_map(|sm| {
                let got = cyclic_sumset_mask(r, rm, sm).count_ones() as u64;
                let want = lower[rs][sm.count_ones() as usize];
                (got < want).then(|| Counterexample {
                    index: (rm - 1) * sets + (sm - 1),
                    set: None,
                    details: format!(
                        "R={:?} S={:?}: |R+S|={got} < {want}",
                        bits(rm),
                        bits(sm)
                    ),
                })
            })
        })
    })?;
    Ok(match found {
        None => Verdict::Pass { checked: sets * sets },
        Some(c) => Verdict::Counterexample(c),
    })
}

fn bits(m: u64) -> Vec<u32> {
    (0..64).filter(|b| m >> b & 1 == 1).collect()
}

/// Largest spanning constant seen for one doubling value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierEntry {
    pub doubling: Rational,
    pub max_spanning: Rational,
    /// Smallest-mask set attaining `max_spanning`.
    pub witness: GroupSubset,
}

type FrontierMap = BTreeMap<Rational, (Rational, u64)>;

fn merge_frontier(mut a: FrontierMap, b: FrontierMap) -> FrontierMap {
    for (k, (s, m)) in b {
        a.entry(k)
            .and_modify(|e| {
                if s > e.0 || (s == e.0 && m < e.1) {
                    *e = (s, m);
                }
            })
            .or_insert((s, m));
    }
    a
}

/// For every doubling value achieved by a filtered subset, the exact
/// maximum spanning constant and a witness; sorted by doubling.
pub fn frontier(group: &Group, filter: Filter, config: &SweepConfig) -> Result<Vec<FrontierEntry>> {
    let space = SubsetSpace::new(group, filter)?;
    if space.size() > config.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: space.size(),
            budget: config.budget,
        });
    }
    let count = space.size() as u64;
    let map = in_pool(config.workers, || {
        (0..count)
            .into_par_iter()
            .fold(FrontierMap::new, |mut acc, k| {
                let m = space.mask(k);
                if m == 0 {
                    return acc;
                }
                let size = m.count_ones() as u64;
                let sum = sumset_mask(group, m, m).count_ones() as u64;
                let span = span_size_mask(group, m) as u64;
                let d = Rational::new(sum, size);
                let s = Rational::new(span, size);
                acc.entry(d)
                    .and_modify(|e| {
                        if s > e.0 || (s == e.0 && m < e.1) {
                            *e = (s, m);
                        }
                    })
                    .or_insert((s, m));
                acc
            })
            .reduce(FrontierMap::new, merge_frontier)
    })?;
    Ok(map
        .into_iter()
        .map(|(doubling, (max_spanning, m))| FrontierEntry {
            doubling,
            max_spanning,
            witness: GroupSubset::from_mask(group, m),
        })
        .collect())
}
