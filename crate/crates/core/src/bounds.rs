//! Closed-form spanning bounds and the extremal constructions.
//!
//! Bounds of the form `c·q^e` with rational `c` and `e` are kept symbolic and
//! compared exactly: `c·q^{a/b} <= s` iff `c^b·q^a <= s^b`, evaluated in big
//! integers. No floating point enters any verdict.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{prime_power, Group, GroupSpec};
use crate::subset::GroupSubset;
use crate::sumset::Rational;

pub type BigRational = Ratio<BigInt>;

/// Default threshold above which the main bound is claimed to hold.
pub const DEFAULT_K0: u64 = 8;

/// Largest exponent numerator evaluated exactly.
const MAX_EXPONENT: u64 = 1 << 24;

pub(crate) fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn check_k(k: &Rational) -> Result<()> {
    if *k < Rational::one() {
        return Err(Error::OutOfRange(format!("K = {k} must be at least 1")));
    }
    Ok(())
}

/// `G(x) = (C(x,2) + x + 1) / (x + 1)`.
pub fn g_func(x: u64) -> Result<Rational> {
    if x == 0 {
        return Err(Error::OutOfRange("G(x) needs x >= 1".into()));
    }
    Ok(Rational::new(x * (x - 1) / 2 + x + 1, x + 1))
}

/// Piecewise extremal spanning constant for torsion 2: with `t` the unique
/// integer such that `G(t) <= K < G(t+1)`, returns `2^{t+1}·K/(t²+t+2)` below
/// `(t²+t+1)/(2t)` and `2^{t+1}·K/(t²+t+1)` from there on.
pub fn f_func(k: &Rational) -> Result<Rational> {
    check_k(k)?;
    let mut t = 1u64;
    while g_func(t + 1)? <= *k {
        t += 1;
        if t > 60 {
            return Err(Error::OutOfRange(format!("K = {k} too large for F")));
        }
    }
    let threshold = Rational::new(t * t + t + 1, 2 * t);
    let scale = 1u64 << (t + 1);
    let den = if *k < threshold { t * t + t + 2 } else { t * t + t + 1 };
    Ok(*k * Rational::new(scale, den))
}

/// Which closed-form bound a [`BoundExpr`] encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundName {
    /// `q^{2K-2} / (2K-1)`, claimed for `K > K_0`.
    Main,
    /// `q^{2K}/K` for `p >= 5`, `q^{10K}/K` for `p = 3`, for all `K >= 1`.
    AllK,
    /// `q^{2K}/K` up to an undetermined constant, for `q = 2^m`.
    PowerOfTwo,
    /// `K²·r^{K⁴}`.
    FreimanRuzsa,
    /// `K²·r^{2K²-2}`.
    GreenRuzsa,
}

impl BoundName {
    pub const ALL: [BoundName; 5] = [
        BoundName::Main,
        BoundName::AllK,
        BoundName::PowerOfTwo,
        BoundName::FreimanRuzsa,
        BoundName::GreenRuzsa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Main => "main",
            BoundName::AllK => "all-k",
            BoundName::PowerOfTwo => "power-of-two",
            BoundName::FreimanRuzsa => "freiman-ruzsa",
            BoundName::GreenRuzsa => "green-ruzsa",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown bound `{s}`")))
    }
}

/// A bound value `factor · base^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundExpr {
    pub name: BoundName,
    pub factor: BigRational,
    pub base: u64,
    pub exponent: BigRational,
    /// Set when the true bound carries an unknown multiplicative constant.
    pub constant_undetermined: bool,
}

fn exponent_parts(e: &BigRational) -> Result<(BigInt, u64)> {
    let b = e
        .denom()
        .to_u64()
        .filter(|&b| b <= MAX_EXPONENT)
        .ok_or_else(|| Error::OutOfRange("exponent denominator too large".into()))?;
    if e.numer().magnitude() > &BigUint::from(MAX_EXPONENT) {
        return Err(Error::OutOfRange("exponent too large to evaluate exactly".into()));
    }
    Ok((e.numer().clone(), b))
}

fn pow_rat(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

fn pow_int(base: u64, e: &BigInt) -> BigInt {
    let e = e.magnitude().to_u64().unwrap();
    num_traits::pow(BigInt::from(base), e as usize)
}

/// `cmp_power` in `u128` when nothing overflows.
fn cmp_power_small(c: &BigRational, q: u64, a: &BigInt, b: u64, s: &BigRational) -> Option<Ordering> {
    let b = u32::try_from(b).ok()?;
    let pw = |x: &BigInt| x.to_u128()?.checked_pow(b);
    let (cn, cd, sn, sd) = (pw(c.numer())?, pw(c.denom())?, pw(s.numer())?, pw(s.denom())?);
    let qa = (q as u128).checked_pow(u32::try_from(a.magnitude().to_u64()?).ok()?)?;
    let mut lhs = cn.checked_mul(sd)?;
    let mut rhs = sn.checked_mul(cd)?;
    if *a >= BigInt::zero() {
        lhs = lhs.checked_mul(qa)?;
    } else {
        rhs = rhs.checked_mul(qa)?;
    }
    Some(lhs.cmp(&rhs))
}

/// Orders `c · q^e` against `s` exactly.
fn cmp_power(c: &BigRational, q: u64, e: &BigRational, s: &BigRational) -> Result<Ordering> {
    let (a, b) = exponent_parts(e)?;
    if let Some(o) = cmp_power_small(c, q, &a, b, s) {
        return Ok(o);
    }
    let mut lhs = pow_rat(c, b);
    let mut rhs = pow_rat(s, b);
    let qa = BigRational::from_integer(pow_int(q, &a));
    if a >= BigInt::zero() {
        lhs *= qa;
    } else {
        rhs *= qa;
    }
    Ok(lhs.cmp(&rhs))
}

impl BoundExpr {
    /// Exact ordering of the bound relative to `s` (`Greater` means the
    /// bound exceeds `s`).
    pub fn cmp_value(&self, s: &Rational) -> Result<Ordering> {
        let s = big(s);
        if !self.exponent.is_integer() {
            // q^floor(e) < q^e < q^ceil(e) settles most cases with small powers
            let lo = self.exponent.floor();
            if cmp_power(&self.factor, self.base, &lo, &s)? != Ordering::Less {
                return Ok(Ordering::Greater);
            }
            if cmp_power(&self.factor, self.base, &self.exponent.ceil(), &s)? != Ordering::Greater {
                return Ok(Ordering::Less);
            }
        }
        cmp_power(&self.factor, self.base, &self.exponent, &s)
    }

    /// Whether `s <= bound`.
    pub fn admits(&self, s: &Rational) -> Result<bool> {
        Ok(self.cmp_value(s)? != Ordering::Less)
    }

    /// Exact value when the exponent is an integer.
    pub fn exact(&self) -> Option<BigRational> {
        if !self.exponent.is_integer() {
            return None;
        }
        let (a, _) = exponent_parts(&self.exponent).ok()?;
        let q = BigRational::from_integer(pow_int(self.base, &a));
        Some(if a >= BigInt::zero() { &self.factor * q } else { &self.factor / q })
    }

    /// Floating-point approximation, for display only.
    pub fn approx(&self) -> f64 {
        let c = self.factor.numer().to_f64().unwrap_or(f64::NAN)
            / self.factor.denom().to_f64().unwrap_or(f64::NAN);
        let e = self.exponent.numer().to_f64().unwrap_or(f64::NAN)
            / self.exponent.denom().to_f64().unwrap_or(f64::NAN);
        c * (self.base as f64).powf(e)
    }
}

/// Exact ordering of two bounds over the same base.
pub fn compare_bounds(x: &BoundExpr, y: &BoundExpr) -> Result<Ordering> {
    if x.base != y.base {
        return Err(Error::OutOfRange("bounds over different bases".into()));
    }
    let e = &x.exponent - &y.exponent;
    cmp_power(&x.factor, x.base, &e, &y.factor)
}

fn two_k(k: &Rational) -> BigRational {
    big(k) * BigRational::from_integer(BigInt::from(2))
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn check_prime_power(q: u64) -> Result<(u64, u32)> {
    prime_power(q).ok_or_else(|| Error::OutOfRange(format!("{q} is not a prime power")))
}

/// `q^{2K-2} / (2K-1)`.
pub fn bound_main(q: u64, k: &Rational) -> Result<BoundExpr> {
    check_k(k)?;
    check_prime_power(q)?;
    Ok(BoundExpr {
        name: BoundName::Main,
        factor: (two_k(k) - int(1)).recip(),
        base: q,
        exponent: two_k(k) - int(2),
        constant_undetermined: false,
    })
}

/// `q^{2K}/K` for `p >= 5`, `q^{10K}/K` for `p = 3`.
pub fn bound_all_k(q: u64, p: u64, k: &Rational) -> Result<BoundExpr> {
    check_k(k)?;
    let (qp, _) = check_prime_power(q)?;
    if qp != p {
        return Err(Error::OutOfRange(format!("{q} is not a power of {p}")));
    }
    let mult = match p {
        3 => 10,
        p if p >= 5 => 2,
        _ => return Err(Error::OutOfRange("the all-K bound needs p >= 3".into())),
    };
    Ok(BoundExpr {
        name: BoundName::AllK,
        factor: big(k).recip(),
        base: q,
        exponent: big(k) * int(mult),
        constant_undetermined: false,
    })
}

/// `q^{2K}/K` for `q = 2^m`; the true bound carries an unknown constant.
pub fn bound_q2m(q: u64, k: &Rational) -> Result<BoundExpr> {
    check_k(k)?;
    if check_prime_power(q)?.0 != 2 {
        return Err(Error::OutOfRange(format!("{q} is not a power of 2")));
    }
    Ok(BoundExpr {
        name: BoundName::PowerOfTwo,
        factor: big(k).recip(),
        base: q,
        exponent: two_k(k),
        constant_undetermined: true,
    })
}

/// `K²·r^{K⁴}`.
pub fn bound_freiman_ruzsa(r: u64, k: &Rational) -> Result<BoundExpr> {
    check_k(k)?;
    let kb = big(k);
    Ok(BoundExpr {
        name: BoundName::FreimanRuzsa,
        factor: &kb * &kb,
        base: r,
        exponent: num_traits::pow(kb.clone(), 4),
        constant_undetermined: false,
    })
}

/// `K²·r^{2K²-2}`.
pub fn bound_green_ruzsa(r: u64, k: &Rational) -> Result<BoundExpr> {
    check_k(k)?;
    let kb = big(k);
    Ok(BoundExpr {
        name: BoundName::GreenRuzsa,
        factor: &kb * &kb,
        base: r,
        exponent: &kb * &kb * int(2) - int(2),
        constant_undetermined: false,
    })
}

/// Evaluates the named bound; `p` is only consulted by [`BoundName::AllK`].
pub fn bound_by_name(name: BoundName, q: u64, p: u64, k: &Rational) -> Result<BoundExpr> {
    match name {
        BoundName::Main => bound_main(q, k),
        BoundName::AllK => bound_all_k(q, p, k),
        BoundName::PowerOfTwo => bound_q2m(q, k),
        BoundName::FreimanRuzsa => bound_freiman_ruzsa(q, k),
        BoundName::GreenRuzsa => bound_green_ruzsa(q, k),
    }
}

/// Outcome of comparing one set's spanning constant against a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub bound_name: BoundName,
    pub k: Rational,
    pub spanning: Rational,
    pub holds: bool,
    /// Sign of `bound - spanning`.
    pub margin: Ordering,
}

pub fn check_bound(bound: &BoundExpr, k: Rational, spanning: Rational) -> Result<BoundCheck> {
    let margin = bound.cmp_value(&spanning)?;
    Ok(BoundCheck {
        bound_name: bound.name,
        k,
        spanning,
        holds: margin != Ordering::Less,
        margin,
    })
}

/// Parses `a/b` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse(format!("bad rational `{s}`"));
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?);
            if b == 0 {
                return Err(err());
            }
            Rational::new(a, b)
        }
        None => Rational::from_integer(s.trim().parse().map_err(|_| err())?),
    };
    Ok(r)
}

/// `{0, e_1, ..., e_{2K-2}}` in `(Z/rZ)^{2K-2}`: doubling `K`, spanning
/// `r^{2K-2}/(2K-1)`.
pub fn gen_tightness_example(r: u64, k: &Rational) -> Result<(Group, GroupSubset)> {
    if r < 3 {
        return Err(Error::OutOfRange(format!("r = {r} must be at least 3")));
    }
    let dim = *k * 2 - Rational::from_integer(2);
    if *k < Rational::from_integer(1) || !dim.is_integer() || dim.is_zero() {
        return Err(Error::OutOfRange(format!("2K - 2 must be a positive integer, K = {k}")));
    }
    let dim = dim.to_integer() as usize;
    let group = Group::new(GroupSpec::homogeneous(r, dim)?);
    let set = GroupSubset::from_indices(
        &group,
        std::iter::once(0).chain((0..dim).map(|i| group.basis_index(i))),
    )?;
    Ok((group, set))
}

/// `{0, e_1, 2e_1, e_2, ..., e_{α+1}}` in `Z/3 ⊕ (Z/3^m)^α`.
pub fn gen_dependence_example(m: u32, alpha: usize) -> Result<(Group, GroupSubset)> {
    if m == 0 || alpha < 2 || !alpha.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!(
            "need m >= 1 and even alpha >= 2, got m={m} alpha={alpha}"
        )));
    }
    let mut exps = vec![1];
    exps.extend(std::iter::repeat_n(m, alpha));
    let group = Group::new(GroupSpec::new(3, exps)?);
    let e1 = group.basis_index(0);
    let set = GroupSubset::from_indices(
        &group,
        [0, e1, 2 * e1]
            .into_iter()
            .chain((1..=alpha).map(|i| group.basis_index(i))),
    )?;
    Ok((group, set))
}

/// `1 + α/2`, the least `K_0` compatible with the dependence example.
pub fn k0_lower_bound(alpha: usize) -> Rational {
    Rational::new(alpha as u64 + 2, 2)
}
