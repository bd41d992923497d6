//! Brute-force reference implementations.
//!
//! Nothing here calls the sumset kernel, the order tables or the index
//! arithmetic of [`Group`]; only the list of moduli is read.

use crate::group::Group;
use crate::subset::GroupSubset;

fn digits_of(mut x: usize, moduli: &[u64]) -> Vec<u64> {
    moduli
        .iter()
        .map(|&q| {
            let d = x as u64 % q;
            x /= q as usize;
            d
        })
        .collect()
}

fn index_of(digits: &[u64], moduli: &[u64]) -> usize {
    digits
        .iter()
        .zip(moduli)
        .rev()
        .fold(0usize, |acc, (&d, &q)| acc * q as usize + d as usize)
}

/// `|IS(c) + IS(d)|` in `Z/qZ` under the sum order, by sorting the residues
/// on their reversed base-`p` expansion and adding every pair.
pub fn oracle_is_sumset(c: u64, d: u64, q: u64) -> u64 {
    let p = (2..=q).find(|k| q.is_multiple_of(*k)).unwrap();
    let key = |x: u64| {
        let mut digits = Vec::new();
        let mut y = x;
        let mut rest = q;
        while rest > 1 {
            digits.push(y % p);
            y /= p;
            rest /= p;
        }
        digits
    };
    let mut residues: Vec<u64> = (0..q).collect();
    residues.sort_by_key(|&x| key(x));
    let mut hit = vec![false; q as usize];
    for &x in &residues[..c as usize] {
        for &y in &residues[..d as usize] {
            hit[((x + y) % q) as usize] = true;
        }
    }
    hit.iter().filter(|&&h| h).count() as u64
}

/// `|IS(c) + IS(d)|` in `Z/qZ` with initial segments in natural order.
pub fn oracle_natural_is_sumset(c: u64, d: u64, q: u64) -> u64 {
    let mut hit = vec![false; q as usize];
    for x in 0..c {
        for y in 0..d {
            hit[((x + y) % q) as usize] = true;
        }
    }
    hit.iter().filter(|&&h| h).count() as u64
}

/// `A + B` by adding every pair coordinatewise.
pub fn oracle_sumset_naive(group: &Group, a: &GroupSubset, b: &GroupSubset) -> GroupSubset {
    let moduli = group.moduli();
    let mut out = GroupSubset::empty(group);
    for x in a.iter() {
        let dx = digits_of(x, moduli);
        for y in b.iter() {
            let dy = digits_of(y, moduli);
            let s: Vec<u64> = dx
                .iter()
                .zip(&dy)
                .zip(moduli)
                .map(|((u, v), q)| (u + v) % q)
                .collect();
            out.insert(index_of(&s, moduli));
        }
    }
    out
}
