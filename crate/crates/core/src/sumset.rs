//! Sumset kernel and the doubling / spanning calculators.
//!
//! `A + B` is the union over `a ∈ A` of `B` translated by `a`. A translation
//! in the mixed-radix index space is a composition of per-coordinate block
//! rotations: adding `d·e_i` rotates every block of `w_{i+1}` consecutive
//! indices by `d·w_i` positions. Single-word sets use precomputed masked
//! shifts; wider sets rotate bit ranges word by word.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::span::affine_span;
use crate::subset::{word_count, GroupSubset, Words};

/// Exact non-negative rational used for doubling and spanning constants.
pub type Rational = Ratio<u64>;

#[inline]
fn read_bits(words: &[u64], pos: usize, len: usize) -> u64 {
    let (w, o) = (pos / 64, pos % 64);
    let mut v = words[w] >> o;
    if o != 0 && o + len > 64 {
        v |= words[w + 1] << (64 - o);
    }
    if len < 64 {
        v &= (1u64 << len) - 1;
    }
    v
}

#[inline]
fn or_bits(words: &mut [u64], pos: usize, len: usize, v: u64) {
    let (w, o) = (pos / 64, pos % 64);
    words[w] |= v << o;
    if o != 0 && o + len > 64 {
        words[w + 1] |= v >> (64 - o);
    }
}

fn copy_range(src: &[u64], from: usize, dst: &mut [u64], to: usize, len: usize) {
    let mut done = 0;
    while done < len {
        let l = (len - done).min(64);
        let v = read_bits(src, from + done, l);
        if v != 0 {
            or_bits(dst, to + done, l, v);
        }
        done += l;
    }
}

/// Rotates every aligned block of `block` bits forward by `shift` positions.
fn rotate_blocks(src: &[u64], dst: &mut [u64], universe: usize, block: usize, shift: usize) {
    dst.iter_mut().for_each(|w| *w = 0);
    let mut start = 0;
    while start < universe {
        copy_range(src, start, dst, start + shift, block - shift);
        copy_range(src, start + block - shift, dst, start, shift);
        start += block;
    }
}

fn translate_words(group: &Group, src: &[u64], a: usize) -> Words {
    let mut cur: Words = src.iter().copied().collect();
    let mut tmp: Words = smallvec::smallvec![0; src.len()];
    for i in 0..group.rank() {
        let d = group.digit(a, i) as usize;
        if d == 0 {
            continue;
        }
        rotate_blocks(&cur, &mut tmp, group.order(), group.weight(i + 1), d * group.weight(i));
        std::mem::swap(&mut cur, &mut tmp);
    }
    cur
}

/// `S + a`.
pub fn translate(group: &Group, set: &GroupSubset, a: usize) -> GroupSubset {
    if let (Some(m), Some(moves)) = (set.mask(), group.word_moves()) {
        return set.same_shape(smallvec::smallvec![moves.translate(m, a)]);
    }
    set.same_shape(translate_words(group, set.words(), a))
}

/// Single-word sumset for groups with `N <= 64`.
#[inline]
pub(crate) fn sumset_mask(group: &Group, a: u64, b: u64) -> u64 {
    let moves = group.word_moves().expect("single-word group");
    let (small, big) = if a.count_ones() <= b.count_ones() { (a, b) } else { (b, a) };
    let mut acc = 0;
    let mut s = small;
    while s != 0 {
        let x = s.trailing_zeros() as usize;
        s &= s - 1;
        acc |= moves.translate(big, x);
    }
    acc
}

/// Exact sumset `A + B`.
pub fn sumset(group: &Group, a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    a.check(group)?;
    b.check(group)?;
    Ok(sumset_unchecked(group, a, b))
}

pub(crate) fn sumset_unchecked(group: &Group, a: &GroupSubset, b: &GroupSubset) -> GroupSubset {
    if let (Some(x), Some(y), Some(_)) = (a.mask(), b.mask(), group.word_moves()) {
        return a.same_shape(smallvec::smallvec![sumset_mask(group, x, y)]);
    }
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut acc: Words = smallvec::smallvec![0; word_count(group.order())];
    for x in small.iter() {
        let t = translate_words(group, big.words(), x);
        acc.iter_mut().zip(&t).for_each(|(d, s)| *d |= s);
    }
    a.same_shape(acc)
}

/// Doubling constant `|A+A| / |A|`.
pub fn doubling(group: &Group, a: &GroupSubset) -> Result<Rational> {
    a.check(group)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(Rational::new(sumset_unchecked(group, a, a).len() as u64, a.len() as u64))
}

/// Spanning constant `|⟨A⟩| / |A|`.
pub fn spanning(group: &Group, a: &GroupSubset) -> Result<Rational> {
    let span = affine_span(group, a)?;
    Ok(Rational::new(span.len() as u64, a.len() as u64))
}

/// Sizes and exact constants describing one set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub set_size: usize,
    pub sumset_size: usize,
    pub span_size: usize,
    pub doubling: Rational,
    pub spanning: Rational,
}

pub fn report(group: &Group, a: &GroupSubset) -> Result<RatioReport> {
    a.check(group)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let set_size = a.len();
    let sumset_size = sumset_unchecked(group, a, a).len();
    let span_size = affine_span(group, a)?.len();
    Ok(RatioReport {
        set_size,
        sumset_size,
        span_size,
        doubling: Rational::new(sumset_size as u64, set_size as u64),
        spanning: Rational::new(span_size as u64, set_size as u64),
    })
}

/// Lower bound on `|R + S|` for `R, S ⊆ Z/rZ` with the given sizes: the
/// minimum over all divisors `d` of `r` of `(⌈r1/d⌉ + ⌈r2/d⌉ - 1)·d`.
pub fn kneser_lower_bound(r1: u64, r2: u64, r: u64) -> Result<u64> {
    if r == 0 || r1 == 0 || r2 == 0 || r1 > r || r2 > r {
        return Err(Error::OutOfRange(format!(
            "need 1 <= r1, r2 <= r, got r1={r1} r2={r2} r={r}"
        )));
    }
    Ok((1..=r)
        .filter(|d| r.is_multiple_of(*d))
        .map(|d| (r1.div_ceil(d) + r2.div_ceil(d) - 1) * d)
        .min()
        .unwrap())
}

/// `R + S` in `Z/rZ` for `r <= 64`, by rotate-and-OR.
pub fn cyclic_sumset_mask(r: u32, a: u64, b: u64) -> u64 {
    debug_assert!((1..=64).contains(&r));
    let valid = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
    let mut acc = 0;
    let mut s = a;
    while s != 0 {
        let x = s.trailing_zeros();
        s &= s - 1;
        acc |= if x == 0 { b } else { ((b << x) | (b >> (r - x))) & valid };
    }
    acc
}
