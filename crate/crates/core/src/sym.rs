//! The balance semiring `𝕊` of pairs over `(ℝ₊, max, ·)` and the signed-log
//! structure `𝕄~`, kept for comparison with the limit algebra.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{boxplus, smile, Smile};
use crate::error::{BoxError, Result};
use crate::linalg::BoxMatrix;
use crate::perm::{map_permutations, Enumeration};
use crate::scalar::LimitScalar;
use crate::signed_log::{SignedLog, DEFAULT_TIE_TOLERANCE};

/// A pair `(x₊, x₋)` of nonnegative rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SPair {
    plus: LimitScalar,
    minus: LimitScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SClass {
    Positive,
    Negative,
    Balanced,
}

impl SPair {
    pub fn new(plus: LimitScalar, minus: LimitScalar) -> Result<Self> {
        if plus.is_negative() || minus.is_negative() {
            return Err(BoxError::domain(format!(
                "pair components must be nonnegative, got ({plus}, {minus})"
            )));
        }
        Ok(SPair { plus, minus })
    }

    pub fn from_ints(plus: i64, minus: i64) -> Result<Self> {
        SPair::new(LimitScalar::from_int(plus), LimitScalar::from_int(minus))
    }

    pub fn zero() -> Self {
        SPair {
            plus: LimitScalar::zero(),
            minus: LimitScalar::zero(),
        }
    }

    pub fn one() -> Self {
        SPair {
            plus: LimitScalar::one(),
            minus: LimitScalar::zero(),
        }
    }

    /// `x ↦ (x, 0)` for `x ≥ 0` and `(0, -x)` otherwise.
    pub fn embed(x: &LimitScalar) -> Self {
        if x.is_negative() {
            SPair {
                plus: LimitScalar::zero(),
                minus: -x,
            }
        } else {
            SPair {
                plus: x.clone(),
                minus: LimitScalar::zero(),
            }
        }
    }

    pub fn plus(&self) -> &LimitScalar {
        &self.plus
    }

    pub fn minus(&self) -> &LimitScalar {
        &self.minus
    }

    pub fn class(&self) -> SClass {
        match self.minus.cmp(&self.plus) {
            Ordering::Less => SClass::Positive,
            Ordering::Greater => SClass::Negative,
            Ordering::Equal => SClass::Balanced,
        }
    }

    pub fn negate(&self) -> Self {
        SPair {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }
}

impl fmt::Display for SPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.plus, self.minus)
    }
}

/// `x ⊕ y = (max{x₊, y₊}, max{x₋, y₋})`.
pub fn s_add(x: &SPair, y: &SPair) -> SPair {
    SPair {
        plus: x.plus.clone().max(y.plus.clone()),
        minus: x.minus.clone().max(y.minus.clone()),
    }
}

/// `t ⊗ x = (max{t₊x₊, t₋x₋}, max{t₊x₋, t₋x₊})`.
pub fn s_mul(t: &SPair, x: &SPair) -> SPair {
    SPair {
        plus: (&t.plus * &x.plus).max(&t.minus * &x.minus),
        minus: (&t.plus * &x.minus).max(&t.minus * &x.plus),
    }
}

/// `x ∇ y`: `max{x₊, y₋} = max{y₊, x₋}`.
pub fn balanced(x: &SPair, y: &SPair) -> bool {
    x.plus.clone().max(y.minus.clone()) == y.plus.clone().max(x.minus.clone())
}

/// `|A|_𝕊`, the ⊕ of the signed ⊗-products over all permutations.
pub fn s_det(a: &[Vec<SPair>]) -> Result<SPair> {
    s_det_with(a, &Enumeration::default())
}

pub fn s_det_with(a: &[Vec<SPair>], config: &Enumeration) -> Result<SPair> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(BoxError::dimension("the 𝕊 determinant needs a nonempty square matrix"));
    }
    config.check(n)?;
    let columns: Vec<usize> = (0..n).collect();
    let terms = map_permutations(&columns, config.execution, |image, even| {
        let prod = image
            .iter()
            .enumerate()
            .fold(SPair::one(), |acc, (i, &j)| s_mul(&acc, &a[i][j]));
        if even {
            prod
        } else {
            prod.negate()
        }
    });
    Ok(terms.iter().fold(SPair::zero(), |acc, t| s_add(&acc, t)))
}

/// The embedding of a real matrix entry by entry.
pub fn embed_matrix(a: &BoxMatrix) -> Vec<Vec<SPair>> {
    a.row_iter().map(|row| row.iter().map(SPair::embed).collect()).collect()
}

/// `V`: `x₊` on positive pairs, `-x₋` on negative ones, 0 on balanced ones.
pub fn v_map(x: &SPair) -> LimitScalar {
    match x.class() {
        SClass::Positive => x.plus.clone(),
        SClass::Negative => -&x.minus,
        SClass::Balanced => LimitScalar::zero(),
    }
}

/// Both sides of `V(⊕ xᵢ) = ½(⌣+ V(xᵢ) + ⌣- V(xᵢ))`.
pub fn v_identity_sides(xs: &[SPair]) -> (LimitScalar, LimitScalar) {
    let sum = xs.iter().fold(SPair::zero(), |acc, x| s_add(&acc, x));
    let images: Vec<LimitScalar> = xs.iter().map(v_map).collect();
    let rhs = (smile(&images, Smile::Upper) + smile(&images, Smile::Lower)) / LimitScalar::from_int(2);
    (v_map(&sum), rhs)
}

pub fn v_identity_check(xs: &[SPair]) -> bool {
    let (lhs, rhs) = v_identity_sides(xs);
    lhs == rhs
}

/// `ψ_ln`: `ln x`, `ln|x| + iπ` or `-∞`, carried as sign and log-magnitude.
pub fn psi_ln(x: f64) -> SignedLog {
    SignedLog::from_f64(x)
}

/// `ψ_exp`, the inverse of [`psi_ln`].
pub fn psi_exp(z: SignedLog) -> f64 {
    z.to_f64()
}

/// `z ⊗~ u`: log-magnitudes add, the `iπ` parts cancel in pairs.
pub fn slog_mul(x: SignedLog, y: SignedLog) -> SignedLog {
    x.mul(y)
}

/// `z ⊞~ u`: the operand of larger `|·|_𝕄~`, with opposite-sign ties
/// collapsing to the zero element.
pub fn slog_boxplus(x: SignedLog, y: SignedLog) -> SignedLog {
    x.boxplus_tol(y, DEFAULT_TIE_TOLERANCE)
}

/// Checks `ψ_exp ∘ ψ_ln = id` at `x` and `ψ_ln(x ⊞ y) = ψ_ln(x) ⊞~ ψ_ln(y)`.
pub fn slog_roundtrip(x: &LimitScalar, y: &LimitScalar) -> bool {
    let xf = x.to_f64();
    let back = psi_exp(psi_ln(xf));
    let roundtrip = back == xf || (back - xf).abs() <= 1e-12 * xf.abs();
    let lhs = SignedLog::from_scalar(&boxplus(x, y));
    let rhs = slog_boxplus(SignedLog::from_scalar(x), SignedLog::from_scalar(y));
    let homomorphism = lhs.sign() == rhs.sign()
        && (lhs.is_zero() || (lhs.logmag() - rhs.logmag()).abs() <= 1e-12 * lhs.logmag().abs().max(1.0));
    roundtrip && homomorphism
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(plus: i64, minus: i64) -> SPair {
        SPair::from_ints(plus, minus).unwrap()
    }

    #[test]
    fn semiring_operations() {
        assert_eq!(s_add(&sp(3, 0), &sp(0, 2)), sp(3, 2));
        assert_eq!(s_mul(&sp(2, 0), &sp(0, 3)), sp(0, 6));
        assert!(balanced(&sp(27, 27), &SPair::zero()));
        assert!(!balanced(&sp(3, 1), &SPair::zero()));
        assert!(SPair::from_ints(-1, 0).is_err());
    }

    #[test]
    fn witness_determinant() {
        let a = BoxMatrix::from_ints(&[[3, 2, 3], [1, 3, 2], [3, 1, 3]]);
        let d = s_det(&embed_matrix(&a)).unwrap();
        assert_eq!(d, sp(27, 27));
        assert!(balanced(&d, &SPair::zero()));
        assert_eq!(crate::linalg::det_inf(&a).unwrap(), LimitScalar::from_int(12));
        assert_eq!(s_det(&embed_matrix(&BoxMatrix::identity(3))).unwrap(), SPair::one());
    }

    #[test]
    fn v_map_classes() {
        assert_eq!(v_map(&sp(5, 0)), LimitScalar::from_int(5));
        assert_eq!(v_map(&sp(0, 5)), LimitScalar::from_int(-5));
        assert_eq!(v_map(&sp(4, 4)), LimitScalar::zero());
        assert!(v_identity_check(&[sp(3, 0), sp(0, 3)]));
        assert!(v_identity_check(&[sp(2, 0), sp(1, 0)]));
        // a balanced pair carrying the maximum breaks the identity
        assert!(!v_identity_check(&[sp(3, 3), sp(1, 0)]));
    }

    #[test]
    fn signed_log_structure() {
        assert_eq!(slog_mul(psi_ln(-2.0), psi_ln(-3.0)), psi_ln(6.0));
        assert!(slog_boxplus(psi_ln(5.0), psi_ln(-5.0)).is_zero());
        assert_eq!(slog_boxplus(psi_ln(2.0), psi_ln(-3.0)), psi_ln(-3.0));
        assert_eq!(slog_boxplus(psi_ln(4.0), psi_ln(4.0)), psi_ln(4.0));
        for (x, y) in [(2, -3), (5, -5), (-7, 1), (0, 4)] {
            assert!(slog_roundtrip(&LimitScalar::from_int(x), &LimitScalar::from_int(y)));
        }
    }
}
