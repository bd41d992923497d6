use crate::error::Result;
use crate::group::Group;
use crate::order::ell;
use crate::subset::GroupSubset;

use super::check_layer_restricted;

/// `A = ⊔ (A_i + i·e_n)` for `i = 0..p`, each `A_i ⊆ span{0, e_1, ..., e_{n-1}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerDecomposition {
    pub layers: Vec<GroupSubset>,
}

impl LayerDecomposition {
    pub fn reconstruct(&self, group: &Group) -> GroupSubset {
        let en = group.basis_index(group.rank() - 1);
        let mut out = GroupSubset::empty(group);
        for (i, layer) in self.layers.iter().enumerate() {
            for v in layer.iter() {
                out.insert(v + i * en);
            }
        }
        out
    }
}

/// Slices `A` by the value of its last coordinate, which must lie in `0..p`.
pub fn layer_decomposition(group: &Group, a: &GroupSubset) -> Result<LayerDecomposition> {
    a.check(group)?;
    check_layer_restricted(group, a)?;
    let w = group.weight(group.rank() - 1);
    let mut layers = vec![GroupSubset::empty(group); group.prime() as usize];
    for x in a.iter() {
        layers[x / w].insert(x % w);
    }
    Ok(LayerDecomposition { layers })
}

/// Slices of `A` by the sum-order rank of the last coordinate.
///
/// Ranks of `Z/q_n` split into `p` blocks of length `P = p^{m_n - 1}`; block
/// `i` holds the residues with units digit `i`. `layers[i][j-1]` is
/// `A_{i,j} = {v : v + ℓ(iP + j - 1)·e_n ∈ A}` for `1 <= j <= γ_i`, where
/// `s_i` is the largest rank in block `i` that `A` occupies and
/// `γ_i = s_i + 1 - iP`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedLayers {
    pub block_len: usize,
    pub layers: Vec<Vec<GroupSubset>>,
    pub s: Vec<Option<usize>>,
    pub gamma: Vec<Option<usize>>,
}

impl GeneralizedLayers {
    /// `A_{i,j}` with `j` counted from 1.
    pub fn get(&self, i: usize, j: usize) -> Option<&GroupSubset> {
        j.checked_sub(1).and_then(|j| self.layers.get(i)?.get(j))
    }

    pub fn reconstruct(&self, group: &Group) -> GroupSubset {
        let n = group.rank();
        let q = group.moduli()[n - 1];
        let w = group.weight(n - 1);
        let mut out = GroupSubset::empty(group);
        for (i, block) in self.layers.iter().enumerate() {
            for (j, layer) in block.iter().enumerate() {
                let c = ell((i * self.block_len + j) as u64, q).unwrap() as usize;
                for v in layer.iter() {
                    out.insert(v + c * w);
                }
            }
        }
        out
    }
}

pub fn generalized_layers(group: &Group, a: &GroupSubset) -> Result<GeneralizedLayers> {
    a.check(group)?;
    let n = group.rank();
    let p = group.prime() as usize;
    let q = group.moduli()[n - 1];
    let block_len = (q as usize) / p;
    let w = group.weight(n - 1);
    let mut by_rank = vec![GroupSubset::empty(group); q as usize];
    for x in a.iter() {
        let c = x / w;
        let r = ell(c as u64, q).unwrap() as usize; // digit reversal is its own inverse
        by_rank[r].insert(x % w);
    }
    let mut layers = Vec::with_capacity(p);
    let mut s = Vec::with_capacity(p);
    let mut gamma = Vec::with_capacity(p);
    for i in 0..p {
        let block = &by_rank[i * block_len..(i + 1) * block_len];
        match block.iter().rposition(|l| !l.is_empty()) {
            Some(last) => {
                layers.push(block[..=last].to_vec());
                s.push(Some(i * block_len + last));
                gamma.push(Some(last + 1));
            }
            None => {
                layers.push(Vec::new());
                s.push(None);
                gamma.push(None);
            }
        }
    }
    Ok(GeneralizedLayers {
        block_len,
        layers,
        s,
        gamma,
    })
}
