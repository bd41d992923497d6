//! The sum order and pseudo-sum order on the group.
//!
//! On `Z/p^mZ` the sum order compares base-p digits starting from the units
//! digit, so the rank of `x` is the digit reversal of `x` over `m` digits.
//! On the product the last coordinate is most significant. The pseudo-sum
//! order compares the last coordinate by its natural integer value instead.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::group::{Group, GroupSpec};
use crate::subset::GroupSubset;

/// Which total order governs comparisons and initial segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderKind {
    SumOrder,
    PseudoSumOrder,
}

impl OrderKind {
    pub const ALL: [OrderKind; 2] = [OrderKind::SumOrder, OrderKind::PseudoSumOrder];

    pub(crate) fn slot(self) -> usize {
        match self {
            OrderKind::SumOrder => 0,
            OrderKind::PseudoSumOrder => 1,
        }
    }
}

/// Reverses the `m` base-`p` digits of `x`.
pub(crate) fn reverse_digits(mut x: u64, p: u64, m: u32) -> u64 {
    let mut r = 0;
    for _ in 0..m {
        r = r * p + x % p;
        x /= p;
    }
    r
}

/// `ℓ(i)`: the `(i+1)`-th smallest residue of `Z/qZ` under the sum order.
pub fn ell(i: u64, q: u64) -> Result<u64> {
    let (p, m) = crate::group::prime_power(q)
        .ok_or_else(|| Error::OutOfRange(format!("{q} is not a prime power")))?;
    if i >= q {
        return Err(Error::IndexOutOfRange { index: i, limit: q });
    }
    Ok(reverse_digits(i, p, m))
}

pub(crate) fn compute_rank(spec: &GroupSpec, digit_rev: &[Vec<u32>], x: usize, kind: OrderKind) -> usize {
    let n = spec.rank();
    let mut r = 0;
    for i in 0..n {
        let d = spec.digit(x, i) as usize;
        let v = if kind == OrderKind::PseudoSumOrder && i == n - 1 {
            d
        } else {
            digit_rev[i][d] as usize
        };
        r += v * spec.weight(i);
    }
    r
}

fn compute_unrank(group: &Group, r: usize, kind: OrderKind) -> usize {
    let n = group.rank();
    let mut x = 0;
    for i in 0..n {
        let d = (r / group.weight(i)) as u64 % group.moduli()[i];
        let v = if kind == OrderKind::PseudoSumOrder && i == n - 1 {
            d
        } else {
            // digit reversal is an involution
            group.inner.digit_rev[i][d as usize] as u64
        };
        x += v as usize * group.weight(i);
    }
    x
}

/// Position of `x` in the given order (the height function for the sum order).
#[inline]
pub fn rank(group: &Group, x: usize, kind: OrderKind) -> usize {
    match &group.inner.rank_tables {
        Some(t) => t[kind.slot()][x] as usize,
        None => compute_rank(group, &group.inner.digit_rev, x, kind),
    }
}

/// Checked variant of [`rank`].
pub fn rank_checked(group: &Group, x: usize, kind: OrderKind) -> Result<usize> {
    group.check_index(x)?;
    Ok(rank(group, x, kind))
}

/// Element of the given rank.
pub fn unrank(group: &Group, r: usize, kind: OrderKind) -> Result<usize> {
    group.check_index(r)?;
    Ok(match &group.inner.unrank_tables {
        Some(t) => t[kind.slot()][r] as usize,
        None => compute_unrank(group, r, kind),
    })
}

pub fn cmp(group: &Group, x: usize, y: usize, kind: OrderKind) -> Ordering {
    rank(group, x, kind).cmp(&rank(group, y, kind))
}

pub fn cmp_sum(group: &Group, x: usize, y: usize) -> Ordering {
    cmp(group, x, y, OrderKind::SumOrder)
}

pub fn cmp_pseudo(group: &Group, x: usize, y: usize) -> Ordering {
    cmp(group, x, y, OrderKind::PseudoSumOrder)
}

/// `h(A)`: the sum of sum-order ranks of the members of `A`.
pub fn height(group: &Group, a: &GroupSubset) -> u64 {
    a.iter().map(|x| rank(group, x, OrderKind::SumOrder) as u64).sum()
}

/// All elements listed in increasing order.
pub fn ordered_elements(group: &Group, kind: OrderKind) -> Vec<usize> {
    (0..group.order())
        .map(|r| unrank(group, r, kind).unwrap())
        .collect()
}

/// `IS(t, S)`: the `t` smallest elements of the explicit list `S`.
pub fn initial_segment_of(group: &Group, t: usize, s: &[usize], kind: OrderKind) -> Result<Vec<usize>> {
    if t > s.len() {
        return Err(Error::SizeExceedsSet {
            requested: t,
            available: s.len(),
        });
    }
    let mut sorted = s.to_vec();
    sorted.sort_by_key(|&x| rank(group, x, kind));
    sorted.truncate(t);
    Ok(sorted)
}

/// `IS(t, S)` for a subset `S`.
pub fn initial_segment_in(group: &Group, t: usize, s: &GroupSubset, kind: OrderKind) -> Result<GroupSubset> {
    s.check(group)?;
    let elems: Vec<usize> = s.iter().collect();
    let seg = initial_segment_of(group, t, &elems, kind)?;
    GroupSubset::from_indices(group, seg)
}

/// `IS(t) = IS(t, G)`.
pub fn initial_segment(group: &Group, t: usize, kind: OrderKind) -> Result<GroupSubset> {
    if t > group.order() {
        return Err(Error::SizeExceedsSet {
            requested: t,
            available: group.order(),
        });
    }
    GroupSubset::from_indices(group, (0..t).map(|r| unrank(group, r, kind).unwrap()))
}

/// Closed form for `|IS(c) + IS(d)|` in `Z/qZ`, `q = p^m`: the minimum over
/// `t ∈ {1, p, ..., p^m}` of `(⌈c/t⌉ + ⌈d/t⌉ - 1)·t`.
pub fn is_sumset_size_formula(c: u64, d: u64, q: u64) -> Result<u64> {
    let (p, m) = crate::group::prime_power(q)
        .ok_or_else(|| Error::OutOfRange(format!("{q} is not a prime power")))?;
    if c == 0 || d == 0 || c >= q || d >= q {
        return Err(Error::OutOfRange(format!("need 1 <= c, d < q, got c={c} d={d} q={q}")));
    }
    Ok((0..=m)
        .map(|k| p.pow(k))
        .map(|t| (c.div_ceil(t) + d.div_ceil(t) - 1) * t)
        .min()
        .unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_examples() {
        assert_eq!(ell(0, 8).unwrap(), 0);
        assert_eq!(ell(1, 8).unwrap(), 4);
        assert_eq!(ell(2, 8).unwrap(), 2);
        assert_eq!(ell(1, 9).unwrap(), 3);
        for i in 0..7 {
            assert_eq!(ell(i, 7).unwrap(), i);
        }
        assert!(matches!(ell(8, 8), Err(Error::IndexOutOfRange { .. })));
        assert!(ell(1, 12).is_err());
    }

    #[test]
    fn sum_order_listings() {
        let z8: Group = "2^3".parse().unwrap();
        assert_eq!(ordered_elements(&z8, OrderKind::SumOrder), vec![0, 4, 2, 6, 1, 5, 3, 7]);
        let z9: Group = "3^2".parse().unwrap();
        assert_eq!(ordered_elements(&z9, OrderKind::SumOrder), vec![0, 3, 6, 1, 4, 7, 2, 5, 8]);
        assert_eq!(ordered_elements(&z9, OrderKind::PseudoSumOrder), (0..9).collect::<Vec<_>>());
        assert_eq!(rank(&z9, 3, OrderKind::SumOrder), 1);
    }

    #[test]
    fn product_comparisons() {
        let v: Group = "3^1 x 3^1".parse().unwrap();
        let e1 = v.encode(&[1, 0]).unwrap();
        let e2 = v.encode(&[0, 1]).unwrap();
        assert_eq!(cmp_sum(&v, e1, e2), Ordering::Less);
        assert_eq!(rank(&v, e2, OrderKind::SumOrder), 3);
        let x = v.encode(&[2, 0]).unwrap();
        assert_eq!(cmp_pseudo(&v, x, e2), Ordering::Less);

        let g: Group = "3^2 x 3^1".parse().unwrap();
        let a = g.encode(&[3, 1]).unwrap();
        let b = g.encode(&[1, 1]).unwrap();
        assert_eq!(cmp_pseudo(&g, a, b), Ordering::Less);
        assert_eq!(cmp_sum(&g, a, a), Ordering::Equal);
        for kind in OrderKind::ALL {
            assert_eq!(rank(&g, 0, kind), 0);
        }
    }

    #[test]
    fn initial_segment_examples() {
        let z9: Group = "3^2".parse().unwrap();
        let is4 = initial_segment(&z9, 4, OrderKind::SumOrder).unwrap();
        assert_eq!(is4.iter().collect::<Vec<_>>(), vec![0, 1, 3, 6]);
        let isp = initial_segment(&z9, 2, OrderKind::PseudoSumOrder).unwrap();
        assert_eq!(isp.iter().collect::<Vec<_>>(), vec![0, 1]);
        let s = GroupSubset::from_indices(&z9, [2, 5, 7]).unwrap();
        assert!(initial_segment_in(&z9, 0, &s, OrderKind::SumOrder).unwrap().is_empty());
        assert_eq!(initial_segment_in(&z9, 3, &s, OrderKind::SumOrder).unwrap(), s);
        assert!(matches!(
            initial_segment_in(&z9, 4, &s, OrderKind::SumOrder),
            Err(Error::SizeExceedsSet { .. })
        ));
    }

    #[test]
    fn formula_examples() {
        assert_eq!(is_sumset_size_formula(3, 3, 9).unwrap(), 3);
        assert_eq!(is_sumset_size_formula(4, 4, 9).unwrap(), 7);
        assert_eq!(is_sumset_size_formula(1, 1, 27).unwrap(), 1);
        assert!(is_sumset_size_formula(9, 1, 9).is_err());
        assert!(is_sumset_size_formula(0, 1, 9).is_err());
    }

    #[test]
    fn unrank_without_tables() {
        let g: Group = "2^3 x 2^3".parse().unwrap();
        for kind in OrderKind::ALL {
            for x in 0..g.order() {
                assert_eq!(compute_unrank(&g, rank(&g, x, kind), kind), x);
            }
        }
    }
}
