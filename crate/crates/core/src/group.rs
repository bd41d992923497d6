//! The ambient group `Z/p^{m_1} ⊕ ... ⊕ Z/p^{m_n}` and its dense mixed-radix indexing.
//!
//! Elements are addressed by a dense index in `[0, N)` where coordinate 1 is the
//! least significant digit: `index = x_1 + q_1·x_2 + q_1·q_2·x_3 + ...`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Largest supported group order.
pub const MAX_ORDER: usize = 1 << 28;

/// Shape of a finite abelian p-group `⊕ Z/p^{m_i}Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    prime: u64,
    exponents: Vec<u32>,
    moduli: Vec<u64>,
    weights: Vec<usize>,
    order: usize,
    torsion: u64,
    ascending: bool,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^m` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut m = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

impl GroupSpec {
    pub fn new(prime: u64, exponents: Vec<u32>) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::InvalidGroup(format!("{prime} is not prime")));
        }
        if exponents.is_empty() {
            return Err(Error::InvalidGroup("at least one coordinate required".into()));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidGroup("exponents must be positive".into()));
        }
        let mut moduli = Vec::with_capacity(exponents.len());
        let mut weights = Vec::with_capacity(exponents.len() + 1);
        let mut order: u128 = 1;
        for &m in &exponents {
            let q = (prime as u128)
                .checked_pow(m)
                .filter(|&q| q <= MAX_ORDER as u128)
                .ok_or(Error::GroupTooLarge(u128::MAX))?;
            weights.push(order as usize);
            order *= q;
            if order > MAX_ORDER as u128 {
                return Err(Error::GroupTooLarge(order));
            }
            moduli.push(q as u64);
        }
        weights.push(order as usize);
        let max_m = *exponents.iter().max().unwrap();
        let ascending = exponents.windows(2).all(|w| w[0] <= w[1]);
        Ok(GroupSpec {
            prime,
            torsion: prime.pow(max_m),
            exponents,
            moduli,
            weights,
            order: order as usize,
            ascending,
        })
    }

    /// `(Z/qZ)^n` for a prime power `q`.
    pub fn homogeneous(q: u64, n: usize) -> Result<Self> {
        let (p, m) = prime_power(q)
            .ok_or_else(|| Error::InvalidGroup(format!("{q} is not a prime power")))?;
        GroupSpec::new(p, vec![m; n])
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Coordinate moduli `q_i = p^{m_i}`.
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of coordinates `n`.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Group order `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Torsion `q = p^{max m_i}`.
    pub fn torsion(&self) -> u64 {
        self.torsion
    }

    pub fn is_ascending(&self) -> bool {
        self.ascending
    }

    /// Dense-index weight of coordinate `i` (0-based); `weight(n) = N`.
    pub fn weight(&self, i: usize) -> usize {
        self.weights[i]
    }

    /// Dense index of the basis vector `e_{i+1}`.
    pub fn basis_index(&self, i: usize) -> usize {
        self.weights[i]
    }

    pub fn encode(&self, coords: &[u64]) -> Result<usize> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        let mut index = 0;
        for (i, (&x, &q)) in coords.iter().zip(&self.moduli).enumerate() {
            if x >= q {
                return Err(Error::InvalidElement(format!(
                    "coordinate {} = {x} not below {q}",
                    i + 1
                )));
            }
            index += x as usize * self.weights[i];
        }
        Ok(index)
    }

    pub fn decode(&self, index: usize) -> Result<GroupElement> {
        self.check_index(index)?;
        Ok(GroupElement {
            coords: (0..self.rank()).map(|i| self.digit(index, i)).collect(),
        })
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange {
                index: index as u64,
                limit: self.order as u64,
            });
        }
        Ok(())
    }

    /// Coordinate `i` (0-based) of the element with the given dense index.
    #[inline]
    pub fn digit(&self, index: usize, i: usize) -> u64 {
        ((index / self.weights[i]) as u64) % self.moduli[i]
    }

    #[inline]
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for i in 0..self.rank() {
            let q = self.moduli[i];
            out += (((self.digit(a, i) + self.digit(b, i)) % q) as usize) * self.weights[i];
        }
        out
    }

    #[inline]
    pub fn neg_index(&self, a: usize) -> usize {
        let mut out = 0;
        for i in 0..self.rank() {
            let q = self.moduli[i];
            out += (((q - self.digit(a, i)) % q) as usize) * self.weights[i];
        }
        out
    }

    #[inline]
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    /// `k·a`, i.e. `a` added to itself `k` times.
    pub fn smul_index(&self, k: u64, a: usize) -> usize {
        let mut out = 0;
        for i in 0..self.rank() {
            let q = self.moduli[i] as u128;
            out += (((k as u128 % q) * self.digit(a, i) as u128 % q) as usize) * self.weights[i];
        }
        out
    }

    /// Additive order of the element.
    pub fn element_order(&self, a: usize) -> u64 {
        (0..self.rank())
            .map(|i| {
                let x = self.digit(a, i);
                let q = self.moduli[i];
                if x == 0 {
                    1
                } else {
                    q / num_integer::gcd(x, q)
                }
            })
            .max()
            .unwrap_or(1)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let (a, b) = (self.encode(a.coords())?, self.encode(b.coords())?);
        self.decode(self.add_index(a, b))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        let a = self.encode(a.coords())?;
        self.decode(self.neg_index(a))
    }

    pub fn smul(&self, k: u64, a: &GroupElement) -> Result<GroupElement> {
        let a = self.encode(a.coords())?;
        self.decode(self.smul_index(k, a))
    }

    /// Parses comma-separated coordinates such as `4,2`.
    pub fn parse_element(&self, s: &str) -> Result<usize> {
        let coords = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate `{}`", c.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.encode(&coords)
    }

    /// Comma-separated coordinates of a dense index.
    pub fn format_index(&self, index: usize) -> String {
        let mut s = String::new();
        for i in 0..self.rank() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&self.digit(index, i).to_string());
        }
        s
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for x in std::iter::once(self.prime).chain(self.exponents.iter().map(|&m| m as u64)) {
            h ^= x;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{}^{}", self.prime, m)?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `p^m1 x p^m2 x ... x p^mn`; a bare `p` means `p^1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut prime = None;
        let mut exponents = Vec::new();
        for part in s.split(['x', 'X', '×']) {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("empty factor in `{s}`")));
            }
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (part, "1"),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime `{base}`")))?;
            let exp: u32 = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent `{exp}`")))?;
            match prime {
                None => prime = Some(base),
                Some(p) if p != base => {
                    return Err(Error::InvalidGroup(format!(
                        "mixed primes {p} and {base}"
                    )))
                }
                _ => {}
            }
            exponents.push(exp);
        }
        GroupSpec::new(prime.unwrap_or(0), exponents)
    }
}

/// A group element as an explicit coordinate vector `(x_1, ..., x_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn new(coords: Vec<u64>) -> Self {
        GroupElement { coords }
    }

    pub fn zero(n: usize) -> Self {
        GroupElement { coords: vec![0; n] }
    }

    /// The basis vector `e_{i+1}` of an `n`-coordinate group.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        GroupElement { coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// One masked rotation step of a single-word translation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Move {
    pub left: u32,
    pub right: u32,
    pub hi: u64,
    pub lo: u64,
}

/// Per-element translation programs for groups with `N <= 64`.
#[derive(Debug)]
pub(crate) struct WordMoves {
    moves: Vec<Move>,
    offsets: Vec<u32>,
}

impl WordMoves {
    fn build(spec: &GroupSpec) -> Self {
        let n = spec.order();
        let valid = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut moves = Vec::new();
        let mut offsets = vec![0u32];
        for a in 0..n {
            for i in 0..spec.rank() {
                let d = spec.digit(a, i) as usize;
                if d == 0 {
                    continue;
                }
                let block = spec.weight(i + 1);
                let shift = d * spec.weight(i);
                let (mut hi, mut lo) = (0u64, 0u64);
                for k in 0..n {
                    if k % block >= shift {
                        hi |= 1 << k;
                    } else {
                        lo |= 1 << k;
                    }
                }
                moves.push(Move {
                    left: shift as u32,
                    right: (block - shift) as u32,
                    hi: hi & valid,
                    lo: lo & valid,
                });
            }
            offsets.push(moves.len() as u32);
        }
        WordMoves { moves, offsets }
    }

    #[inline]
    pub fn translate(&self, mut x: u64, a: usize) -> u64 {
        let (s, e) = (self.offsets[a] as usize, self.offsets[a + 1] as usize);
        for m in &self.moves[s..e] {
            x = ((x << m.left) & m.hi) | ((x >> m.right) & m.lo);
        }
        x
    }
}

/// Largest group for which full rank tables are materialised.
const RANK_TABLE_LIMIT: usize = 1 << 20;

pub(crate) struct Inner {
    pub spec: GroupSpec,
    pub tag: u64,
    pub word_moves: Option<WordMoves>,
    /// Digit-reversal rank of each residue, per coordinate.
    pub digit_rev: Vec<Vec<u32>>,
    /// `[sum order, pseudo-sum order]` ranks and their inverses.
    pub rank_tables: Option<[Vec<u32>; 2]>,
    pub unrank_tables: Option<[Vec<u32>; 2]>,
    pub directions: OnceLock<crate::compression::DirectionCache>,
}

/// A group together with precomputed kernel tables; cheap to clone and share.
#[derive(Clone)]
pub struct Group {
    pub(crate) inner: Arc<Inner>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.inner.spec)
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl Eq for Group {}

impl Deref for Group {
    type Target = GroupSpec;

    fn deref(&self) -> &GroupSpec {
        &self.inner.spec
    }
}

impl From<GroupSpec> for Group {
    fn from(spec: GroupSpec) -> Self {
        Group::new(spec)
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Group::new(s.parse()?))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.spec.fmt(f)
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Self {
        let word_moves = (spec.order() <= 64).then(|| WordMoves::build(&spec));
        let digit_rev = spec
            .exponents()
            .iter()
            .map(|&m| {
                let p = spec.prime();
                let q = p.pow(m);
                (0..q)
                    .map(|x| crate::order::reverse_digits(x, p, m) as u32)
                    .collect()
            })
            .collect();
        let mut inner = Inner {
            tag: spec.fingerprint(),
            spec,
            word_moves,
            digit_rev,
            rank_tables: None,
            unrank_tables: None,
            directions: OnceLock::new(),
        };
        let n = inner.spec.order();
        if n <= RANK_TABLE_LIMIT {
            let mut ranks = [vec![0u32; n], vec![0u32; n]];
            let mut unranks = [vec![0u32; n], vec![0u32; n]];
            for x in 0..n {
                for (k, kind) in crate::order::OrderKind::ALL.iter().enumerate() {
                    let r = crate::order::compute_rank(&inner.spec, &inner.digit_rev, x, *kind);
                    ranks[k][x] = r as u32;
                    unranks[k][r] = x as u32;
                }
            }
            inner.rank_tables = Some(ranks);
            inner.unrank_tables = Some(unranks);
        }
        Group {
            inner: Arc::new(inner),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.inner.spec
    }

    pub(crate) fn tag(&self) -> u64 {
        self.inner.tag
    }

    pub(crate) fn word_moves(&self) -> Option<&WordMoves> {
        self.inner.word_moves.as_ref()
    }
}
