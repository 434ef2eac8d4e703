//! Sign plus log-magnitude numbers.
//!
//! A [`SignedLog`] stores `x` as `(sign(x), ln|x|)`. Negative numbers sit on
//! the `iπ` branch of the extended logarithm, so multiplication adds
//! log-magnitudes and multiplies signs. Raising to an odd power `2p+1` only
//! scales the log-magnitude, which is why every finite-p computation in the
//! crate runs on this type: `x^(2p+1)` overflows `f64` long before `p` gets
//! interesting.

use std::cmp::Ordering;
use std::fmt;

use crate::scalar::{LimitScalar, PIndex};

/// Relative tolerance for magnitude ties between values that did not come
/// straight from exact rationals.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy)]
pub struct SignedLog {
    sign: i8,
    logmag: f64,
    /// Set when the log-magnitude was computed directly from an exact
    /// rational; two such values tie only on bit-identical log-magnitudes.
    exact: bool,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        logmag: f64::NEG_INFINITY,
        exact: true,
    };

    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        logmag: 0.0,
        exact: true,
    };

    /// Builds from raw parts. A zero sign or a `-inf` log-magnitude yields the
    /// zero element.
    pub fn from_parts(sign: i8, logmag: f64) -> Self {
        if sign == 0 || logmag == f64::NEG_INFINITY {
            return SignedLog::ZERO;
        }
        debug_assert!(!logmag.is_nan());
        SignedLog {
            sign: sign.signum(),
            logmag,
            exact: false,
        }
    }

    /// The extended logarithm of a float (`ln x`, `-inf`, or `ln(-x) + iπ`).
    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog::from_parts(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    /// Provenance-tracked constructor from an exact rational.
    pub fn from_scalar(x: &LimitScalar) -> Self {
        if x.is_zero() {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: x.signum(),
            logmag: x.ln_abs(),
            exact: true,
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn logmag(self) -> f64 {
        self.logmag
    }

    pub fn is_exact(self) -> bool {
        self.exact
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// The inverse map back to the reals. Overflows to `±inf` when the
    /// magnitude exceeds `f64`.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.logmag.exp(),
        }
    }

    pub fn neg(self) -> Self {
        SignedLog {
            sign: -self.sign,
            ..self
        }
    }

    pub fn abs(self) -> Self {
        SignedLog {
            sign: self.sign.abs(),
            ..self
        }
    }

    /// Product: log-magnitudes add, `iπ` branches combine.
    pub fn mul(self, rhs: SignedLog) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return SignedLog::ZERO;
        }
        SignedLog::from_parts(self.sign * rhs.sign, self.logmag + rhs.logmag)
    }

    /// Quotient; `None` for a zero divisor.
    pub fn checked_div(self, rhs: SignedLog) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(SignedLog::ZERO);
        }
        Some(SignedLog::from_parts(self.sign * rhs.sign, self.logmag - rhs.logmag))
    }

    /// `x^(2p+1)`.
    pub fn phi(self, p: PIndex) -> Self {
        if self.is_zero() || p.p() == 0 {
            return self;
        }
        SignedLog::from_parts(self.sign, self.logmag * p.exponent_f64())
    }

    /// `x^(1/(2p+1))`, the inverse of [`SignedLog::phi`].
    pub fn phi_inv(self, p: PIndex) -> Self {
        if self.is_zero() || p.p() == 0 {
            return self;
        }
        SignedLog::from_parts(self.sign, self.logmag / p.exponent_f64())
    }

    /// Magnitude tie test: bit-exact for two exact-provenance values, within
    /// `rel_tol` otherwise.
    pub fn ties_with(self, other: SignedLog, rel_tol: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.exact && other.exact {
            return self.logmag.to_bits() == other.logmag.to_bits();
        }
        let scale = 1f64.max(self.logmag.abs()).max(other.logmag.abs());
        (self.logmag - other.logmag).abs() <= rel_tol * scale
    }

    /// Compares magnitudes, treating ties per [`SignedLog::ties_with`].
    pub fn cmp_mag(self, other: SignedLog, rel_tol: f64) -> Ordering {
        if self.ties_with(other, rel_tol) {
            Ordering::Equal
        } else if self.is_zero() {
            Ordering::Less
        } else if other.is_zero() {
            Ordering::Greater
        } else {
            self.logmag.total_cmp(&other.logmag)
        }
    }

    /// The binary boxplus on the log side: larger magnitude wins, an
    /// equal-sign tie keeps the value, an opposite-sign tie gives zero.
    pub fn boxplus(self, other: SignedLog) -> Self {
        self.boxplus_tol(other, DEFAULT_TIE_TOLERANCE)
    }

    pub fn boxplus_tol(self, other: SignedLog, rel_tol: f64) -> Self {
        match self.cmp_mag(other, rel_tol) {
            Ordering::Greater => self,
            Ordering::Less => other,
            Ordering::Equal if self.sign == other.sign => self,
            Ordering::Equal => SignedLog::ZERO,
        }
    }

    /// Compares the represented real numbers (exact log-magnitudes, no tie
    /// tolerance).
    pub fn cmp_value(self, other: SignedLog) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.logmag.total_cmp(&other.logmag),
                _ => other.logmag.total_cmp(&self.logmag),
            },
            ord => ord,
        }
    }
}

impl PartialEq for SignedLog {
    /// Same sign and bit-identical log-magnitude; provenance is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.logmag.to_bits() == other.logmag.to_bits())
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "SignedLog(0)"),
            s => write!(
                f,
                "SignedLog({}exp({}))",
                if s > 0 { "+" } else { "-" },
                self.logmag
            ),
        }
    }
}

impl From<&LimitScalar> for SignedLog {
    fn from(x: &LimitScalar) -> Self {
        SignedLog::from_scalar(x)
    }
}

/// `ln(Σ exp(t_i))` over log-terms, summed largest-first for a deterministic
/// result.
pub(crate) fn log_sum_exp(terms: &mut [f64]) -> f64 {
    if terms.is_empty() {
        return f64::NEG_INFINITY;
    }
    terms.sort_unstable_by(|a, b| b.total_cmp(a));
    let top = terms[0];
    if top == f64::INFINITY {
        return top;
    }
    let tail: f64 = terms[1..].iter().map(|t| (t - top).exp()).sum();
    top + tail.ln_1p()
}

/// Signed difference `exp(lp) - exp(ln)` in log form.
pub(crate) fn signed_log_difference(lp: f64, ln: f64) -> SignedLog {
    if lp == ln {
        return SignedLog::ZERO;
    }
    let (sign, hi, lo) = if lp > ln { (1, lp, ln) } else { (-1, ln, lp) };
    let delta = lo - hi;
    // ln(1 - e^delta), delta < 0
    let tail = if delta > -std::f64::consts::LN_2 {
        (-delta.exp_m1()).ln()
    } else {
        (-delta.exp()).ln_1p()
    };
    SignedLog::from_parts(sign, hi + tail)
}

/// Σ x_i over signed-log terms computed as separate log-sum-exps over the
/// positive and negative parts. Terms whose magnitudes are bit-identical and
/// whose signs are opposite cancel exactly before any rounding happens.
pub fn signed_sum(xs: &[SignedLog]) -> SignedLog {
    // net multiplicity per exact magnitude
    let mut mags: Vec<(u64, f64, i8)> = xs
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| (x.logmag.to_bits(), x.logmag, x.sign))
        .collect();
    mags.sort_unstable_by(|a, b| a.1.total_cmp(&b.1));
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut i = 0;
    while i < mags.len() {
        let mut j = i;
        let mut net: i64 = 0;
        while j < mags.len() && mags[j].0 == mags[i].0 {
            net += mags[j].2 as i64;
            j += 1;
        }
        if net != 0 {
            let term = mags[i].1 + (net.unsigned_abs() as f64).ln();
            if net > 0 {
                pos.push(term);
            } else {
                neg.push(term);
            }
        }
        i = j;
    }
    let lp = log_sum_exp(&mut pos);
    let ln = log_sum_exp(&mut neg);
    signed_log_difference(lp, ln)
}

/// The φ_p-sum `(Σ x_i^(2p+1))^(1/(2p+1))`, evaluated entirely in the signed
/// log domain.
pub fn phi_p_sum(xs: &[SignedLog], p: PIndex) -> SignedLog {
    let powered: Vec<SignedLog> = xs.iter().map(|x| x.phi(p)).collect();
    signed_sum(&powered).phi_inv(p)
}

/// [`phi_p_sum`] over exact rationals, through the provenance-tracked
/// constructor.
pub fn phi_p_sum_scalars(xs: &[LimitScalar], p: PIndex) -> SignedLog {
    let logs: Vec<SignedLog> = xs.iter().map(SignedLog::from_scalar).collect();
    phi_p_sum(&logs, p)
}

/// The n-ary boxplus transported to the log side (`ψ_ln ∘ ⊞ ∘ ψ_exp`):
/// magnitudes are grouped with the tie predicate, and the largest group with a
/// nonzero net sign count decides the result.
pub fn nary_boxplus_log(xs: &[SignedLog], rel_tol: f64) -> SignedLog {
    let mut items: Vec<SignedLog> = xs.iter().copied().filter(|x| !x.is_zero()).collect();
    items.sort_unstable_by(|a, b| b.logmag.total_cmp(&a.logmag));
    let mut i = 0;
    while i < items.len() {
        let head = items[i];
        let mut j = i;
        let mut net: i64 = 0;
        while j < items.len() && head.ties_with(items[j], rel_tol) {
            net += items[j].sign as i64;
            j += 1;
        }
        if net != 0 {
            return SignedLog {
                sign: net.signum() as i8,
                ..head
            };
        }
        i = j;
    }
    SignedLog::ZERO
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn p_zero_is_ordinary_addition() {
        let s = phi_p_sum(&[SignedLog::from_f64(2.0), SignedLog::from_f64(3.0)], PIndex::new(0));
        assert!(close(s.to_f64(), 5.0, 1e-14));
    }

    #[test]
    fn cube_root_of_nine() {
        // (2^3 + 1^3)^(1/3)
        let s = phi_p_sum(&[SignedLog::from_f64(2.0), SignedLog::from_f64(1.0)], PIndex::new(1));
        assert!(close(s.to_f64(), 9f64.cbrt(), 1e-14));
        assert!((s.to_f64() - 2.080084).abs() < 1e-6);
    }

    #[test]
    fn odd_powers_cancel_exactly() {
        for p in 0..30 {
            let x = LimitScalar::ratio(-7, 3);
            let s = phi_p_sum_scalars(&[x.clone(), -x], PIndex::new(p));
            assert!(s.is_zero(), "p = {p}");
        }
    }

    #[test]
    fn large_p_does_not_overflow() {
        let xs = [SignedLog::from_f64(1e300), SignedLog::from_f64(-3e299)];
        let s = phi_p_sum(&xs, PIndex::new(60));
        assert_eq!(s.sign(), 1);
        assert!(close(s.to_f64(), 1e300, 1e-9));
    }

    #[test]
    fn mul_sign_branches() {
        let a = SignedLog::from_f64(-2.0);
        let b = SignedLog::from_f64(-3.0);
        let prod = a.mul(b);
        assert_eq!(prod.sign(), 1);
        assert!(close(prod.to_f64(), 6.0, 1e-15));
        assert!(a.mul(SignedLog::ZERO).is_zero());
    }

    #[test]
    fn binary_boxplus_on_logs() {
        let five = SignedLog::from_scalar(&LimitScalar::from_int(5));
        assert!(five.boxplus(five.neg()).is_zero());
        let two = SignedLog::from_scalar(&LimitScalar::from_int(2));
        let m3 = SignedLog::from_scalar(&LimitScalar::from_int(-3));
        assert_eq!(two.boxplus(m3), m3);
        assert_eq!(five.boxplus(five), five);
    }

    #[test]
    fn nary_log_boxplus_matches_example() {
        let xs: Vec<SignedLog> = [-3, -2, 3, 3, 1, -3]
            .iter()
            .map(|&v| SignedLog::from_scalar(&LimitScalar::from_int(v)))
            .collect();
        let r = nary_boxplus_log(&xs, DEFAULT_TIE_TOLERANCE);
        assert!(close(r.to_f64(), -2.0, 1e-14));
    }

    #[test]
    fn value_ordering() {
        let vals = [-5.0, -1.0, 0.0, 0.5, 7.0];
        for (i, a) in vals.iter().enumerate() {
            for (j, b) in vals.iter().enumerate() {
                let ord = SignedLog::from_f64(*a).cmp_value(SignedLog::from_f64(*b));
                assert_eq!(ord, i.cmp(&j));
            }
        }
    }

    #[test]
    fn near_cancellation_keeps_precision() {
        // 4^3 - 1 = 63
        let xs = [SignedLog::from_f64(4.0), SignedLog::from_f64(-1.0)];
        let s = phi_p_sum(&xs, PIndex::new(1));
        assert!(close(s.to_f64(), 63f64.cbrt(), 1e-14));
    }
}
