//! Generated subgroups, affine spans, cosets and basis normalisation.

use crate::error::{Error, Result};
use crate::group::Group;
use crate::subset::GroupSubset;
use crate::sumset::{sumset_unchecked, translate};

/// Elements `0, v, 2v, ...` of the cyclic subgroup `⟨v⟩`, in that order.
pub(crate) fn multiples(group: &Group, v: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut y = v;
    while y != 0 {
        out.push(y);
        y = group.add_index(y, v);
    }
    out
}

/// The subgroup `⟨S⟩` of all integer combinations of members of `S`.
///
/// Generators are absorbed one at a time: `H ← H + ⟨x⟩` for each `x ∉ H`.
pub fn subgroup_generated(group: &Group, s: &GroupSubset) -> Result<GroupSubset> {
    s.check(group)?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(subgroup_unchecked(group, s))
}

pub(crate) fn subgroup_unchecked(group: &Group, s: &GroupSubset) -> GroupSubset {
    let mut h = GroupSubset::empty(group);
    h.insert(0);
    for x in s.iter() {
        if h.contains(x) {
            continue;
        }
        let cyc = GroupSubset::from_indices(group, multiples(group, x)).unwrap();
        h = sumset_unchecked(group, &h, &cyc);
        if h.len() == group.order() {
            break;
        }
    }
    h
}

/// `|⟨A⟩|` for a single-word set in a group with `N <= 64`.
pub(crate) fn span_size_mask(group: &Group, a: u64) -> usize {
    let moves = group.word_moves().expect("single-word group");
    let a0 = a.trailing_zeros() as usize;
    let shifted = moves.translate(a, group.neg_index(a0));
    let full = group.order() as u32;
    let mut h = 1u64;
    let mut rest = shifted & !1;
    while rest != 0 {
        let x = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if h >> x & 1 == 1 {
            continue;
        }
        let cyc = multiples(group, x).into_iter().fold(0u64, |m, y| m | 1 << y);
        h = crate::sumset::sumset_mask(group, h, cyc);
        if h.count_ones() == full {
            break;
        }
        rest &= !h;
    }
    h.count_ones() as usize
}

/// The smallest coset of a subgroup containing `A`: `a₀ + ⟨A - a₀⟩`.
pub fn affine_span(group: &Group, a: &GroupSubset) -> Result<GroupSubset> {
    a.check(group)?;
    let a0 = a.first().ok_or(Error::EmptySet)?;
    let shifted = translate(group, a, group.neg_index(a0));
    let h = subgroup_unchecked(group, &shifted);
    Ok(translate(group, &h, a0))
}

/// The coset `x + ⟨v⟩` listed as `x, x+v, x+2v, ...`.
pub fn cyclic_coset(group: &Group, x: usize, v: usize) -> Result<Vec<usize>> {
    group.check_index(x)?;
    group.check_index(v)?;
    if v == 0 {
        return Err(Error::ZeroDirection);
    }
    Ok(multiples(group, v)
        .into_iter()
        .map(|k| group.add_index(x, k))
        .collect())
}

pub(crate) fn is_subgroup(group: &Group, h: &GroupSubset) -> bool {
    h.contains(0) && sumset_unchecked(group, h, h) == *h
}

/// One representative per coset of `H`: the minimal dense index in each coset.
pub fn coset_partition(group: &Group, h: &GroupSubset) -> Result<Vec<usize>> {
    h.check(group)?;
    if !is_subgroup(group, h) {
        return Err(Error::NotSubgroup);
    }
    let mut covered = GroupSubset::empty(group);
    let mut reps = Vec::with_capacity(group.order() / h.len());
    for x in 0..group.order() {
        if covered.contains(x) {
            continue;
        }
        reps.push(x);
        covered = covered.union(&translate(group, h, x));
    }
    Ok(reps)
}

/// An automorphism `σ` of the group, given by the preimages of the basis
/// vectors: `σ(b_i) = e_i`.
#[derive(Clone, Debug)]
pub struct Automorphism {
    preimages: Vec<usize>,
    forward: Vec<u32>,
}

impl Automorphism {
    /// `b_i` with `σ(b_i) = e_i`.
    pub fn basis_preimages(&self) -> &[usize] {
        &self.preimages
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.forward[x] as usize
    }

    pub fn apply_set(&self, group: &Group, a: &GroupSubset) -> GroupSubset {
        GroupSubset::from_indices(group, a.iter().map(|x| self.apply(x))).unwrap()
    }
}

const BASIS_SEARCH_LIMIT: usize = 1_000_000;

struct BasisSearch<'a> {
    group: &'a Group,
    candidates: Vec<Vec<usize>>,
    chosen: Vec<usize>,
    nodes: usize,
}

impl BasisSearch<'_> {
    fn reduce(&self, x: usize) -> Vec<u64> {
        let p = self.group.prime();
        (0..self.group.rank()).map(|i| self.group.digit(x, i) % p).collect()
    }

    /// Whether the reductions mod `p` of the chosen elements are independent.
    fn independent(&self, rows: &[Vec<u64>]) -> bool {
        let p = self.group.prime();
        let n = self.group.rank();
        let mut m: Vec<Vec<u64>> = rows.to_vec();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = mod_inverse(m[rank][col], p);
            for c in 0..n {
                m[rank][c] = m[rank][c] * inv % p;
            }
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in 0..n {
                        m[r][c] = (m[r][c] + p * p - f * m[rank][c] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank == m.len()
    }

    fn search(&mut self, rows: &mut Vec<Vec<u64>>) -> bool {
        let i = self.chosen.len();
        if i == self.group.rank() {
            return true;
        }
        for k in 0..self.candidates[i].len() {
            self.nodes += 1;
            if self.nodes > BASIS_SEARCH_LIMIT {
                return false;
            }
            let b = self.candidates[i][k];
            if self.chosen.contains(&b) {
                continue;
            }
            rows.push(self.reduce(b));
            if self.independent(rows) {
                self.chosen.push(b);
                if self.search(rows) {
                    return true;
                }
                self.chosen.pop();
            }
            rows.pop();
        }
        false
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut r = 1;
    let (mut base, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

/// Looks for `b_1, ..., b_n ∈ A` and an automorphism `σ` with `σ(b_i) = e_i`,
/// returning `σ` and `σ(A) ⊇ {0, e_1, ..., e_n}`.
///
/// `b_i` must have order dividing `q_i` and the `b_i` must generate the group;
/// this is a best-effort search and may report [`Error::NoCompatibleBasis`].
pub fn basis_normalize(group: &Group, a: &GroupSubset) -> Result<(Automorphism, GroupSubset)> {
    a.check(group)?;
    if !a.contains(0) {
        return Err(Error::MissingZero);
    }
    if affine_span(group, a)?.len() != group.order() {
        return Err(Error::NotSpanning);
    }
    let n = group.rank();
    let candidates = (0..n)
        .map(|i| {
            let q = group.moduli()[i];
            let e = group.basis_index(i);
            let mut c: Vec<usize> = a
                .iter()
                .filter(|&b| b != 0 && b != e && group.smul_index(q, b) == 0)
                .collect();
            if a.contains(e) {
                c.insert(0, e);
            }
            c
        })
        .collect();
    let mut search = BasisSearch {
        group,
        candidates,
        chosen: Vec::new(),
        nodes: 0,
    };
    if !search.search(&mut Vec::new()) {
        return Err(Error::NoCompatibleBasis);
    }
    let preimages = search.chosen;
    // φ(x) = Σ x_i b_i is an automorphism; σ = φ⁻¹.
    let mut forward = vec![0u32; group.order()];
    for x in 0..group.order() {
        let mut y = 0;
        for (i, &b) in preimages.iter().enumerate() {
            y = group.add_index(y, group.smul_index(group.digit(x, i), b));
        }
        forward[y] = x as u32;
    }
    let sigma = Automorphism { preimages, forward };
    let image = sigma.apply_set(group, a);
    Ok((sigma, image))
}
