//! Coset compression operators and the compression drivers.
//!
//! `C_X(A)` replaces, in every coset `S` of the subgroup `H(X)`, the part
//! `A ∩ S` by the `|A ∩ S|` smallest elements of `S` under the chosen order.

mod layers;
mod lemmas;

use std::sync::{Arc, OnceLock};

pub use layers::{generalized_layers, layer_decomposition, GeneralizedLayers, LayerDecomposition};
pub use lemmas::{
    basis_prefix_dimension, check_lemma_downset, check_lemma_pseudo_layers, check_lemma_struc,
    check_lemma_struc_with, DownsetViolation, PseudoLayerViolation, StrucReading, StrucViolation,
};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::order::{height, rank, OrderKind};
use crate::span::{affine_span, multiples, subgroup_unchecked};
use crate::subset::{GroupSubset, Words};
use crate::sumset::translate;

/// Single-word lookup tables: per coset its mask and the masks of its
/// initial segments of every length.
#[derive(Debug)]
struct WordTables {
    coset_masks: Vec<u64>,
    prefixes: Vec<u64>,
    stride: usize,
}

/// Precomputed `C_H` for one subgroup `H` and one order.
#[derive(Debug)]
pub struct Compressor {
    kind: OrderKind,
    subgroup: GroupSubset,
    cosets: Vec<Vec<u32>>,
    words: Option<WordTables>,
}

impl Compressor {
    /// Builds the compressor for the subgroup `h`; `h` must be a subgroup.
    pub fn new(group: &Group, h: &GroupSubset, kind: OrderKind) -> Self {
        let members: Vec<usize> = h.iter().collect();
        let mut covered = vec![false; group.order()];
        let mut cosets = Vec::with_capacity(group.order() / members.len());
        for r in 0..group.order() {
            if covered[r] {
                continue;
            }
            let mut coset: Vec<u32> = members
                .iter()
                .map(|&x| group.add_index(r, x) as u32)
                .collect();
            for &y in &coset {
                covered[y as usize] = true;
            }
            coset.sort_by_key(|&y| rank(group, y as usize, kind));
            cosets.push(coset);
        }
        let words = (group.order() <= 64).then(|| {
            let stride = members.len() + 1;
            let mut coset_masks = Vec::with_capacity(cosets.len());
            let mut prefixes = Vec::with_capacity(cosets.len() * stride);
            for coset in &cosets {
                let mut acc = 0u64;
                prefixes.push(0);
                for &y in coset {
                    acc |= 1 << y;
                    prefixes.push(acc);
                }
                coset_masks.push(acc);
            }
            WordTables {
                coset_masks,
                prefixes,
                stride,
            }
        });
        Compressor {
            kind,
            subgroup: h.clone(),
            cosets,
            words,
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn subgroup(&self) -> &GroupSubset {
        &self.subgroup
    }

    /// Cosets of the subgroup, each listed in increasing order.
    pub fn cosets(&self) -> &[Vec<u32>] {
        &self.cosets
    }

    #[inline]
    pub(crate) fn apply_mask(&self, a: u64) -> u64 {
        let t = self.words.as_ref().expect("single-word group");
        let mut out = 0;
        for (c, &m) in t.coset_masks.iter().enumerate() {
            out |= t.prefixes[c * t.stride + (a & m).count_ones() as usize];
        }
        out
    }

    /// `C_H(A)`.
    pub fn apply(&self, a: &GroupSubset) -> GroupSubset {
        if let (Some(m), Some(_)) = (a.mask(), &self.words) {
            return a.same_shape(smallvec::smallvec![self.apply_mask(m)]);
        }
        let mut out: Words = smallvec::smallvec![0; a.words().len()];
        for coset in &self.cosets {
            let k = coset.iter().filter(|&&y| a.contains(y as usize)).count();
            for &y in &coset[..k] {
                out[y as usize / 64] |= 1 << (y % 64);
            }
        }
        a.same_shape(out)
    }

    pub fn is_fixed(&self, a: &GroupSubset) -> bool {
        self.apply(a) == *a
    }
}

/// Lazily built compressors for every cyclic direction of a group.
pub(crate) struct DirectionCache {
    canonical: Vec<OnceLock<u32>>,
    tables: [Vec<OnceLock<Arc<Compressor>>>; 2],
    distinct: OnceLock<Vec<usize>>,
}

impl DirectionCache {
    fn new(n: usize) -> Self {
        DirectionCache {
            canonical: (0..n).map(|_| OnceLock::new()).collect(),
            tables: [
                (0..n).map(|_| OnceLock::new()).collect(),
                (0..n).map(|_| OnceLock::new()).collect(),
            ],
            distinct: OnceLock::new(),
        }
    }
}

fn cache(group: &Group) -> &DirectionCache {
    group
        .inner
        .directions
        .get_or_init(|| DirectionCache::new(group.order()))
}

/// The smallest dense index generating the same cyclic subgroup as `v`.
fn canonical_generator(group: &Group, v: usize) -> usize {
    *cache(group).canonical[v].get_or_init(|| {
        let ord = group.element_order(v);
        let mut best = v;
        let mut y = v;
        for k in 1..ord {
            if k % group.prime() != 0 && y < best {
                best = y;
            }
            y = group.add_index(y, v);
        }
        best as u32
    }) as usize
}

/// Compressor for the cyclic direction `v`, i.e. for `H({v}) = ⟨v⟩`.
pub fn direction_compressor(group: &Group, v: usize, kind: OrderKind) -> Result<Arc<Compressor>> {
    group.check_index(v)?;
    if v == 0 {
        return Err(Error::ZeroDirection);
    }
    Ok(direction_compressor_unchecked(group, v, kind).clone())
}

pub(crate) fn direction_compressor_unchecked(group: &Group, v: usize, kind: OrderKind) -> &Arc<Compressor> {
    let c = canonical_generator(group, v);
    cache(group).tables[kind.slot()][c].get_or_init(|| {
        let h = GroupSubset::from_indices(group, multiples(group, c)).unwrap();
        Arc::new(Compressor::new(group, &h, kind))
    })
}

/// One representative direction per non-trivial cyclic subgroup, taking the
/// sum-order-smallest generator and listing them in sum order.
pub fn distinct_directions(group: &Group) -> &[usize] {
    cache(group).distinct.get_or_init(|| {
        let mut seen = vec![false; group.order()];
        let mut out = Vec::new();
        for r in 1..group.order() {
            let v = crate::order::unrank(group, r, OrderKind::SumOrder).unwrap();
            let c = canonical_generator(group, v);
            if !seen[c] {
                seen[c] = true;
                out.push(v);
            }
        }
        out
    })
}

/// `H(X)`: the smallest subgroup, or coset of a subgroup, containing `X`,
/// returned as `(subgroup, representative)`.
///
/// A singleton `{v}` is read as a direction and yields `(⟨v⟩, 0)`.
pub fn hull(group: &Group, x: &GroupSubset) -> Result<(GroupSubset, usize)> {
    x.check(group)?;
    let x0 = x.first().ok_or(Error::EmptySet)?;
    if x.len() == 1 {
        let h = GroupSubset::from_indices(group, multiples(group, x0))?;
        return Ok((h, 0));
    }
    if x.contains(0) {
        return Ok((subgroup_unchecked(group, x), 0));
    }
    let shifted = translate(group, x, group.neg_index(x0));
    Ok((subgroup_unchecked(group, &shifted), x0))
}

/// `C_X(A)` under the given order.
pub fn compress(group: &Group, a: &GroupSubset, x: &GroupSubset, kind: OrderKind) -> Result<GroupSubset> {
    a.check(group)?;
    let (h, _) = hull(group, x)?;
    if h.len() == 1 {
        return Err(Error::ZeroDirection);
    }
    if x.len() == 1 {
        let v = x.first().unwrap();
        return Ok(direction_compressor_unchecked(group, v, kind).apply(a));
    }
    Ok(Compressor::new(group, &h, kind).apply(a))
}

/// `C_v(A)` for a single direction `v`.
pub fn compress_dir(group: &Group, a: &GroupSubset, v: usize, kind: OrderKind) -> Result<GroupSubset> {
    a.check(group)?;
    Ok(direction_compressor(group, v, kind)?.apply(a))
}

/// Whether `A` is `X`-compressed.
pub fn is_compressed(group: &Group, a: &GroupSubset, x: &GroupSubset, kind: OrderKind) -> Result<bool> {
    Ok(compress(group, a, x, kind)? == *a)
}

/// The affine basis `E = {0, e_1, ..., e_n}`.
pub fn basis_set(group: &Group) -> GroupSubset {
    let mut e = GroupSubset::empty(group);
    e.insert(0);
    for i in 0..group.rank() {
        e.insert(group.basis_index(i));
    }
    e
}

fn require_basis(group: &Group, a: &GroupSubset) -> Result<GroupSubset> {
    let e = basis_set(group);
    if !e.is_subset(a) {
        return Err(Error::MissingBasis);
    }
    Ok(e)
}

fn require_ascending(group: &Group) -> Result<()> {
    if group.is_ascending() {
        Ok(())
    } else {
        Err(Error::AscendingRequired)
    }
}

/// One applied compression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionStep {
    pub direction: usize,
    pub order: OrderKind,
    pub changed: bool,
    pub height_before: u64,
    pub height_after: u64,
}

/// Whether, for every direction `v`, `E ⊆ C_v(A)` implies `C_v(A) = A`.
pub fn is_ee_compressed(group: &Group, a: &GroupSubset) -> Result<bool> {
    a.check(group)?;
    require_ascending(group)?;
    let e = require_basis(group, a)?;
    Ok(ee_witness(group, a, &e).is_none())
}

/// First direction (in sum order of representatives) whose compression moves
/// `A` while keeping `E`.
pub(crate) fn ee_witness(group: &Group, a: &GroupSubset, e: &GroupSubset) -> Option<usize> {
    let dirs = distinct_directions(group);
    if let (Some(am), Some(em)) = (a.mask(), e.mask()) {
        return dirs.iter().copied().find(|&v| {
            let c = direction_compressor_unchecked(group, v, OrderKind::SumOrder).apply_mask(am);
            c != am && c & em == em
        });
    }
    dirs.iter().copied().find(|&v| {
        let c = direction_compressor_unchecked(group, v, OrderKind::SumOrder).apply(a);
        c != *a && e.is_subset(&c)
    })
}

/// Applies sum-order compressions that keep `E` until none moves the set.
///
/// Directions are scanned in sum order of their representatives; each pass
/// applies every admissible compression it meets, and the loop stops after a
/// pass with no change. Every applied step strictly lowers `h(A)`.
pub fn ee_compress_fixpoint(group: &Group, a: &GroupSubset) -> Result<(GroupSubset, Vec<CompressionStep>)> {
    a.check(group)?;
    require_ascending(group)?;
    let e = require_basis(group, a)?;
    if affine_span(group, a)?.len() != group.order() {
        return Err(Error::NotSpanning);
    }
    let dirs = distinct_directions(group);
    let mut cur = a.clone();
    let mut steps = Vec::new();
    loop {
        let mut moved = false;
        for &v in dirs {
            let comp = direction_compressor_unchecked(group, v, OrderKind::SumOrder);
            let next = comp.apply(&cur);
            if next != cur && e.is_subset(&next) {
                steps.push(CompressionStep {
                    direction: v,
                    order: OrderKind::SumOrder,
                    changed: true,
                    height_before: height(group, &cur),
                    height_after: height(group, &next),
                });
                cur = next;
                moved = true;
            }
        }
        if !moved {
            return Ok((cur, steps));
        }
    }
}

/// Members whose last coordinate is zero: `A ∩ span{0, e_1, ..., e_{n-1}}`.
pub(crate) fn bottom_layer_members(group: &Group, a: &GroupSubset) -> Vec<usize> {
    let top = group.weight(group.rank() - 1);
    a.iter().take_while(|&x| x < top).collect()
}

pub(crate) fn check_layer_restricted(group: &Group, a: &GroupSubset) -> Result<()> {
    let n = group.rank();
    if n < 2 {
        return Err(Error::RankTooSmall);
    }
    let limit = group.prime() as usize * group.weight(n - 1);
    if a.iter().any(|x| x >= limit) {
        return Err(Error::LastCoordinateOutOfRange);
    }
    Ok(())
}

/// `C(A)`: the fixpoint of the pseudo-sum compressions `C_{e_n - u}` over all
/// `u ∈ A ∩ span{0, e_1, ..., e_{n-1}}`, rescanning while the set changes.
pub fn pseudo_compress_all(group: &Group, a: &GroupSubset) -> Result<GroupSubset> {
    Ok(pseudo_compress_all_traced(group, a)?.0)
}

pub fn pseudo_compress_all_traced(
    group: &Group,
    a: &GroupSubset,
) -> Result<(GroupSubset, Vec<CompressionStep>)> {
    a.check(group)?;
    check_layer_restricted(group, a)?;
    require_basis(group, a)?;
    let en = group.basis_index(group.rank() - 1);
    let mut cur = a.clone();
    let mut steps = Vec::new();
    loop {
        let mut moved = false;
        for u in bottom_layer_members(group, &cur) {
            let dir = group.sub_index(en, u);
            let comp = direction_compressor_unchecked(group, dir, OrderKind::PseudoSumOrder);
            let next = comp.apply(&cur);
            if next != cur {
                steps.push(CompressionStep {
                    direction: dir,
                    order: OrderKind::PseudoSumOrder,
                    changed: true,
                    height_before: height(group, &cur),
                    height_after: height(group, &next),
                });
                cur = next;
                moved = true;
            }
        }
        if !moved {
            return Ok((cur, steps));
        }
    }
}
