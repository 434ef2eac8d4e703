//! Exact scalars, the odd-power index `p`, and index sets.
//!
//! [`LimitScalar`] is an arbitrary-precision rational. Every comparison the
//! limit operations make (magnitude ties, opposite-value cancellation) is
//! exact, which is what makes the residual-set computation trustworthy.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{BoxError, Result};

/// An exact rational number in canonical form (reduced, positive denominator).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LimitScalar(BigRational);

impl LimitScalar {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(BoxError::domain("zero denominator"));
        }
        Ok(LimitScalar(BigRational::new(numer.into(), denom)))
    }

    pub fn from_int(value: i64) -> Self {
        LimitScalar(BigRational::from_integer(BigInt::from(value)))
    }

    /// Builds a scalar from a ratio of machine integers. Panics on a zero
    /// denominator; meant for literals.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn from_rational(value: BigRational) -> Self {
        LimitScalar(value)
    }

    pub fn zero() -> Self {
        LimitScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        LimitScalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        LimitScalar(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &LimitScalar) -> Option<LimitScalar> {
        if rhs.is_zero() {
            None
        } else {
            Some(LimitScalar(&self.0 / &rhs.0))
        }
    }

    pub fn pow(&self, exp: u32) -> LimitScalar {
        LimitScalar(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Compares magnitudes exactly.
    pub fn cmp_abs(&self, other: &LimitScalar) -> Ordering {
        // |a/b| vs |c/d| with b, d > 0  <=>  |a|*d vs |c|*b
        let lhs = self.0.numer().magnitude() * other.0.denom().magnitude();
        let rhs = other.0.numer().magnitude() * self.0.denom().magnitude();
        lhs.cmp(&rhs)
    }

    pub fn max(self, other: LimitScalar) -> LimitScalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: LimitScalar) -> LimitScalar {
        if other < self {
            other
        } else {
            self
        }
    }

    /// The exact value of a finite float.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(LimitScalar)
    }

    /// Nearest `f64` (may overflow to infinity for astronomically large values).
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() {
                return v;
            }
        }
        let s = self.signum() as f64;
        s * self.ln_abs().exp()
    }

    /// Natural log of the magnitude; `-inf` for zero.
    ///
    /// Deterministic in the value: equal rationals always give bit-identical
    /// results, which the finite-p code relies on for exact cancellation.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_biguint(self.0.numer().magnitude()) - ln_biguint(self.0.denom().magnitude())
    }

    /// Exact `k`-th root when the value is a perfect `k`-th power of a rational.
    pub fn exact_root(&self, k: u32) -> Option<LimitScalar> {
        if k == 0 {
            return None;
        }
        if k == 1 {
            return Some(self.clone());
        }
        if self.is_negative() && k % 2 == 0 {
            return None;
        }
        let n = exact_int_root(self.0.numer().magnitude(), k)?;
        let d = exact_int_root(self.0.denom().magnitude(), k)?;
        let sign = if self.is_negative() { Sign::Minus } else { Sign::Plus };
        let n = if n.is_zero() {
            BigInt::zero()
        } else {
            BigInt::from_biguint(sign, n)
        };
        Some(LimitScalar(BigRational::new(n, BigInt::from(d))))
    }

    /// Parses a finite decimal literal such as `-1.25` or `3e-2` exactly.
    pub fn from_decimal_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(pos) => {
                let e: i64 = t[pos + 1..]
                    .parse()
                    .map_err(|_| BoxError::Parse(format!("bad exponent in {text:?}")))?;
                (&t[..pos], e)
            }
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.find('.') {
            Some(pos) => (&digits[..pos], &digits[pos + 1..]),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(BoxError::Parse(format!("not a decimal number: {text:?}")));
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = if all_digits.is_empty() {
            BigInt::zero()
        } else {
            all_digits.parse().map_err(|_| BoxError::Parse(text.to_string()))?
        };
        if neg {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i64;
        if scale.unsigned_abs() > 4096 {
            return Err(BoxError::Parse(format!("exponent out of range in {text:?}")));
        }
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(LimitScalar(value))
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn exact_int_root(x: &BigUint, k: u32) -> Option<BigUint> {
    let r = x.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *x {
        Some(r)
    } else {
        None
    }
}

impl fmt::Display for LimitScalar {
    /// `num` or `num/den`, with a leading `-` for negatives.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for LimitScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LimitScalar {
    type Err = BoxError;

    /// Accepts `[+-]digits[/digits]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || BoxError::Parse(format!("not a rational literal: {s:?}"));
        let (num_txt, den_txt) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let unsigned = num_txt
            .strip_prefix('-')
            .or_else(|| num_txt.strip_prefix('+'))
            .unwrap_or(num_txt);
        if unsigned.is_empty() || !unsigned.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: BigInt = num_txt.trim_start_matches('+').parse().map_err(|_| bad())?;
        let denom: BigInt = match den_txt {
            Some(d) if !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()) => {
                d.parse().map_err(|_| bad())?
            }
            Some(_) => return Err(bad()),
            None => BigInt::one(),
        };
        LimitScalar::new(numer, denom)
    }
}

impl From<i64> for LimitScalar {
    fn from(v: i64) -> Self {
        LimitScalar::from_int(v)
    }
}

impl From<i32> for LimitScalar {
    fn from(v: i32) -> Self {
        LimitScalar::from_int(v as i64)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&LimitScalar> for &LimitScalar {
            type Output = LimitScalar;
            fn $method(self, rhs: &LimitScalar) -> LimitScalar {
                LimitScalar((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<LimitScalar> for LimitScalar {
            type Output = LimitScalar;
            fn $method(self, rhs: LimitScalar) -> LimitScalar {
                LimitScalar(self.0.$method(rhs.0))
            }
        }
        impl $trait<&LimitScalar> for LimitScalar {
            type Output = LimitScalar;
            fn $method(self, rhs: &LimitScalar) -> LimitScalar {
                LimitScalar(self.0.$method(&rhs.0))
            }
        }
        impl $trait<LimitScalar> for &LimitScalar {
            type Output = LimitScalar;
            fn $method(self, rhs: LimitScalar) -> LimitScalar {
                LimitScalar((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

// Division panics on a zero divisor, like the underlying rational type. Use
// `checked_div` where the divisor may vanish.
forward_binop!(Div, div);

impl Neg for LimitScalar {
    type Output = LimitScalar;
    fn neg(self) -> LimitScalar {
        LimitScalar(-self.0)
    }
}

impl Neg for &LimitScalar {
    type Output = LimitScalar;
    fn neg(self) -> LimitScalar {
        LimitScalar(-&self.0)
    }
}

impl std::iter::Sum for LimitScalar {
    fn sum<I: Iterator<Item = LimitScalar>>(iter: I) -> Self {
        iter.fold(LimitScalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for LimitScalar {
    fn product<I: Iterator<Item = LimitScalar>>(iter: I) -> Self {
        iter.fold(LimitScalar::one(), |a, b| a * b)
    }
}

/// Shorthand for building vectors of scalars from integer literals.
pub fn scalars(values: &[i64]) -> Vec<LimitScalar> {
    values.iter().map(|&v| LimitScalar::from_int(v)).collect()
}

/// The index `p` of the odd-power bijection `x -> x^(2p+1)`.
///
/// Only `p` is stored, so the exponent is odd by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PIndex(u32);

impl PIndex {
    pub const fn new(p: u32) -> Self {
        PIndex(p)
    }

    pub const fn p(self) -> u32 {
        self.0
    }

    /// `2p + 1`.
    pub const fn exponent(self) -> u32 {
        2 * self.0 + 1
    }

    pub fn exponent_f64(self) -> f64 {
        self.exponent() as f64
    }
}

impl From<u32> for PIndex {
    fn from(p: u32) -> Self {
        PIndex(p)
    }
}

/// A sorted, duplicate-free set of 1-based positions into a vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Builds a set from 1-based positions. Zero is rejected; duplicates are
    /// merged.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if indices.contains(&0) {
            return Err(BoxError::domain("index sets are 1-based; found 0"));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(IndexSet { indices })
    }

    /// `[n] = {1, ..., n}`.
    pub fn full(n: usize) -> Self {
        IndexSet {
            indices: (1..=n).collect(),
        }
    }

    pub fn empty() -> Self {
        IndexSet::default()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub(crate) fn check_within(&self, len: usize) -> Result<()> {
        match self.indices.last() {
            Some(&max) if max > len => Err(BoxError::domain(format!(
                "index {max} out of range for a vector of length {len}"
            ))),
            _ => Ok(()),
        }
    }

    /// 0-based positions.
    pub(crate) fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|i| i - 1)
    }
}
