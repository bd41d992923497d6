//! Dense bit-indexed subsets of a group.

use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::group::Group;

pub(crate) type Words = SmallVec<[u64; 2]>;

/// A subset of a group, stored as a bit array over dense indices.
///
/// The subset remembers which group it belongs to by fingerprint only, so it
/// is a plain value; group operations live on [`Group`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSubset {
    tag: u64,
    universe: usize,
    words: Words,
}

pub(crate) fn word_count(universe: usize) -> usize {
    universe.div_ceil(64)
}

impl GroupSubset {
    pub fn empty(group: &Group) -> Self {
        GroupSubset {
            tag: group.tag(),
            universe: group.order(),
            words: smallvec![0; word_count(group.order())],
        }
    }

    pub fn full(group: &Group) -> Self {
        let mut s = Self::empty(group);
        for i in 0..s.universe {
            s.insert(i);
        }
        s
    }

    /// Builds a subset from dense indices; out-of-range indices are an error.
    pub fn from_indices<I: IntoIterator<Item = usize>>(group: &Group, indices: I) -> Result<Self> {
        let mut s = Self::empty(group);
        for i in indices {
            group.check_index(i)?;
            s.insert(i);
        }
        Ok(s)
    }

    /// Builds a subset from coordinate vectors.
    pub fn from_coords<'a, I: IntoIterator<Item = &'a [u64]>>(group: &Group, elems: I) -> Result<Self> {
        let mut s = Self::empty(group);
        for c in elems {
            s.insert(group.encode(c)?);
        }
        Ok(s)
    }

    /// Single-word constructor for groups with `N <= 64`.
    pub fn from_mask(group: &Group, mask: u64) -> Self {
        debug_assert!(group.order() <= 64);
        let valid = if group.order() == 64 { u64::MAX } else { (1u64 << group.order()) - 1 };
        GroupSubset {
            tag: group.tag(),
            universe: group.order(),
            words: smallvec![mask & valid],
        }
    }

    pub(crate) fn same_shape(&self, words: Words) -> Self {
        GroupSubset {
            tag: self.tag,
            universe: self.universe,
            words,
        }
    }

    /// The single word of a subset of a group with `N <= 64`.
    pub fn mask(&self) -> Option<u64> {
        (self.words.len() == 1).then(|| self.words[0])
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn belongs_to(&self, group: &Group) -> bool {
        self.tag == group.tag() && self.universe == group.order()
    }

    pub(crate) fn check(&self, group: &Group) -> Result<()> {
        if self.belongs_to(group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest member by dense index.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    /// Members in ascending dense-index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &GroupSubset) -> GroupSubset {
        self.same_shape(self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect())
    }

    pub fn intersection(&self, other: &GroupSubset) -> GroupSubset {
        self.same_shape(self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect())
    }

    pub fn difference(&self, other: &GroupSubset) -> GroupSubset {
        self.same_shape(self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect())
    }

    pub fn complement(&self) -> GroupSubset {
        let mut out = self.same_shape(self.words.iter().map(|w| !w).collect());
        let tail = self.universe % 64;
        if tail != 0 {
            let last = out.words.len() - 1;
            out.words[last] &= (1u64 << tail) - 1;
        }
        out
    }
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
