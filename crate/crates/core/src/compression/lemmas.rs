//! Structural predicates for `⟨⟨E⟩⟩`-compressed and pseudo-compressed sets.
//!
//! Each checker returns `Ok(None)` when the property holds and the first
//! violation found otherwise. Coordinates in violations are 1-based.

use crate::error::{Error, Result};
use crate::group::Group;
use crate::order::{ell, OrderKind};
use crate::span::affine_span;
use crate::subset::GroupSubset;

use super::{
    bottom_layer_members, check_layer_restricted, direction_compressor_unchecked,
    layer_decomposition, require_ascending, require_basis,
};

/// A direction `t·e_i - v` along which an `⟨⟨E⟩⟩`-compressed set is not compressed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownsetViolation {
    pub coordinate: usize,
    pub t: u64,
    pub v: usize,
}

/// Checks that `A` is `(t·e_i - v)`-compressed for every coordinate `i` and
/// `v ∈ span{0, e_1, ..., e_{i-1}}`: for all non-zero multiples `t` of `p`
/// when `m_i >= 2`, and for `t = 1` with `v ∈ A` when `m_i = 1`.
pub fn check_lemma_downset(group: &Group, a: &GroupSubset) -> Result<Option<DownsetViolation>> {
    a.check(group)?;
    require_ascending(group)?;
    let p = group.prime();
    for i in 0..group.rank() {
        let w = group.weight(i);
        let q = group.moduli()[i];
        let e = group.basis_index(i);
        let ts: Vec<u64> = if group.exponents()[i] >= 2 {
            (p..q).step_by(p as usize).collect()
        } else {
            vec![1]
        };
        for &t in &ts {
            let te = group.smul_index(t, e);
            for v in 0..w {
                if t == 1 && !a.contains(v) {
                    continue;
                }
                let dir = group.sub_index(te, v);
                let comp = direction_compressor_unchecked(group, dir, OrderKind::SumOrder);
                if !comp.is_fixed(a) {
                    return Ok(Some(DownsetViolation {
                        coordinate: i + 1,
                        t,
                        v,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// A failure of the block structure above the maximal basis prefix `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrucViolation {
    /// `v + t·e_c ∈ A` although `p | t`, `t ≠ 0`.
    DivisibleLevelOccupied { coordinate: usize, t: u64, v: usize },
    /// `ℓ(i)·e_c + u ∈ A` for some `u` but `ℓ(s)·e_c + v ∉ A` for a rank
    /// `tP <= s < i`.
    MissingBelow {
        coordinate: usize,
        t: u64,
        i: usize,
        s: usize,
        v: usize,
    },
}

/// Largest `f` with `span{0, e_1, ..., e_f} ⊆ A`.
pub fn basis_prefix_dimension(group: &Group, a: &GroupSubset) -> usize {
    let mut f = 0;
    while f < group.rank() && (0..group.weight(f + 1)).all(|x| a.contains(x)) {
        f += 1;
    }
    f
}

/// Checks the block structure of an `⟨⟨E⟩⟩`-compressed set above the maximal
/// prefix `F = span{0, e_1, ..., e_f} ⊆ A`, for each coordinate `c = f + j`,
/// `j >= 2`, with `P = p^{m_c - 1}` and `W = span{0, e_1, ..., e_{c-1}}`:
///
/// 1. no member has the form `v + t·e_c` with `v ∈ W`, `t ≠ 0`, `p | t`;
/// 2. for `t = 1..p-1`: if `ℓ(i)·e_c + u ∈ A` for some `u ∈ W` and some rank
///    `tP < i < (t+1)P`, then `ℓ(s)·e_c + v ∈ A` for all `v ∈ W` and
///    `tP <= s < i`.
///
/// The second condition only compares ranks inside one block: the ranks in
/// block `t` are exactly the residues congruent to `t` mod `p`.
pub fn check_lemma_struc(group: &Group, a: &GroupSubset) -> Result<Option<StrucViolation>> {
    check_lemma_struc_with(group, a, StrucReading::SameBlock)
}

/// How far the rank `i` in the second structural condition may range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrucReading {
    /// `tP < i < (t+1)P`.
    SameBlock,
    /// Any `i > tP`, so `s` may cross into later blocks.
    Unbounded,
}

pub fn check_lemma_struc_with(
    group: &Group,
    a: &GroupSubset,
    reading: StrucReading,
) -> Result<Option<StrucViolation>> {
    a.check(group)?;
    require_ascending(group)?;
    let n = group.rank();
    let p = group.prime();
    let f = basis_prefix_dimension(group, a);
    for c in (f + 2)..=n {
        let ci = c - 1;
        let w = group.weight(ci);
        let q = group.moduli()[ci];
        for t in (p..q).step_by(p as usize) {
            let base = t as usize * w;
            if let Some(v) = (0..w).find(|&v| a.contains(base + v)) {
                return Ok(Some(StrucViolation::DivisibleLevelOccupied {
                    coordinate: c,
                    t,
                    v,
                }));
            }
        }
        let block = (q / p) as usize;
        let occupied = |r: usize| {
            let base = ell(r as u64, q).unwrap() as usize * w;
            (0..w).any(|u| a.contains(base + u))
        };
        for t in 1..p {
            let lo = t as usize * block;
            let hi = match reading {
                StrucReading::SameBlock => lo + block,
                StrucReading::Unbounded => q as usize,
            };
            let Some(i) = (lo + 1..hi).rev().find(|&r| occupied(r)) else {
                continue;
            };
            for s in lo..i {
                let base = ell(s as u64, q).unwrap() as usize * w;
                if let Some(v) = (0..w).find(|&v| !a.contains(base + v)) {
                    return Ok(Some(StrucViolation::MissingBelow {
                        coordinate: c,
                        t,
                        i,
                        s,
                        v,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// A failure of the layer structure of a pseudo-compressed set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PseudoLayerViolation {
    /// `A_{i+1} ⊄ A_i`.
    NotNested { layer: usize },
    /// `A_0` is not a coset of a subgroup, yet the higher layers are not
    /// `|A_1| = 1, A_2 = ... = ∅`.
    HigherLayersTooLarge { sizes: Vec<usize> },
}

/// Checks the layer nesting `A_0 ⊇ A_1 ⊇ ... ⊇ A_{p-1}`, and that when `A_0`
/// is not a coset of a subgroup, `|A_1| = 1` and every higher layer is empty.
///
/// `A` must contain `E`, have all last coordinates in `0..p`, and be
/// `(e_n - v)`-compressed under the pseudo-sum order for every `v ∈ A_0`.
pub fn check_lemma_pseudo_layers(group: &Group, a: &GroupSubset) -> Result<Option<PseudoLayerViolation>> {
    a.check(group)?;
    check_layer_restricted(group, a)?;
    require_basis(group, a)?;
    let en = group.basis_index(group.rank() - 1);
    for v in bottom_layer_members(group, a) {
        let dir = group.sub_index(en, v);
        if !direction_compressor_unchecked(group, dir, OrderKind::PseudoSumOrder).is_fixed(a) {
            return Err(Error::PreconditionNotCompressed {
                direction: group.decode(dir)?.coords().to_vec(),
            });
        }
    }
    let layers = layer_decomposition(group, a)?.layers;
    for i in 0..layers.len() - 1 {
        if !layers[i + 1].is_subset(&layers[i]) {
            return Ok(Some(PseudoLayerViolation::NotNested { layer: i + 1 }));
        }
    }
    let a0 = &layers[0];
    let a0_is_coset = affine_span(group, a0)?.len() == a0.len();
    if !a0_is_coset {
        let sizes: Vec<usize> = layers.iter().map(|l| l.len()).collect();
        if sizes[1] != 1 || sizes[2..].iter().any(|&s| s != 0) {
            return Ok(Some(PseudoLayerViolation::HigherLayersTooLarge { sizes }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::{basis_set, ee_compress_fixpoint, pseudo_compress_all};

    fn set(g: &Group, elems: &[&[u64]]) -> GroupSubset {
        GroupSubset::from_coords(g, elems.iter().copied()).unwrap()
    }

    #[test]
    fn whole_group_passes() {
        let g: Group = "3^1 x 3^2".parse().unwrap();
        let full = GroupSubset::full(&g);
        assert_eq!(check_lemma_downset(&g, &full).unwrap(), None);
        assert_eq!(check_lemma_struc(&g, &full).unwrap(), None);
        assert_eq!(basis_prefix_dimension(&g, &full), 2);
    }

    #[test]
    fn ascending_required() {
        let g: Group = "3^2 x 3^1".parse().unwrap();
        let full = GroupSubset::full(&g);
        assert_eq!(check_lemma_downset(&g, &full), Err(Error::AscendingRequired));
        assert_eq!(check_lemma_struc(&g, &full), Err(Error::AscendingRequired));
    }

    #[test]
    fn downset_negative_control() {
        let g: Group = "3^1 x 3^1".parse().unwrap();
        // e_2 present but its coset under e_2 - e_1 also holds e_1 + e_2 - e_1
        let a = set(&g, &[&[0, 0], &[1, 0], &[0, 1], &[2, 2]]);
        assert!(check_lemma_downset(&g, &a).unwrap().is_some());
        let (out, _) = ee_compress_fixpoint(&g, &a).unwrap();
        assert_eq!(check_lemma_downset(&g, &out).unwrap(), None);
        assert_eq!(check_lemma_struc(&g, &out).unwrap(), None);
    }

    #[test]
    fn pseudo_layers_subgroup_branch() {
        let g: Group = "3^1 x 3^1".parse().unwrap();
        let a = set(&g, &[&[0, 0], &[1, 0], &[2, 0], &[0, 1], &[1, 1], &[2, 1]]);
        assert_eq!(check_lemma_pseudo_layers(&g, &a).unwrap(), None);
    }

    #[test]
    fn pseudo_layers_negative_control() {
        let g: Group = "3^1 x 3^1".parse().unwrap();
        // A_0 = {0, e_1}, A_1 = {0}, A_2 = {e_1}: not nested and not compressed
        let a = set(&g, &[&[0, 0], &[1, 0], &[0, 1], &[1, 2]]);
        assert!(matches!(
            check_lemma_pseudo_layers(&g, &a),
            Err(Error::PreconditionNotCompressed { .. })
        ));
        let c = pseudo_compress_all(&g, &a).unwrap();
        assert_eq!(check_lemma_pseudo_layers(&g, &c).unwrap(), None);
        assert!(basis_set(&g).is_subset(&c));
    }
}
