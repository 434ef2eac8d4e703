//! Limit hyperplanes through `n` points of `ℝⁿ`.
//!
//! With the points as columns of `V` and `V_(i)` the matrix whose row `i` is
//! replaced by all ones, the hyperplane is
//! `{x : ⌣-_i |V_(i)|_∞ x_i ≤ |V|_∞ ≤ ⌣+_i |V_(i)|_∞ x_i}`.

use crate::algebra::{inner_smile, Smile};
use crate::error::{BoxError, Result};
use crate::linalg::{BoxMatrix, BoxVector, PermutationProducts};
use crate::perm::Enumeration;
use crate::scalar::{LimitScalar, PIndex};
use crate::signed_log::{signed_sum, SignedLog};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitHyperplane {
    coeffs: BoxVector,
    rhs: LimitScalar,
}

impl LimitHyperplane {
    pub fn coeffs(&self) -> &BoxVector {
        &self.coeffs
    }

    pub fn rhs(&self) -> &LimitScalar {
        &self.rhs
    }

    pub fn dimension(&self) -> usize {
        self.coeffs.len()
    }

    /// `(⌣-_i c_i x_i, ⌣+_i c_i x_i)`.
    pub fn forms(&self, x: &BoxVector) -> Result<(LimitScalar, LimitScalar)> {
        Ok((
            inner_smile(self.coeffs.as_slice(), x.as_slice(), Smile::Lower)?,
            inner_smile(self.coeffs.as_slice(), x.as_slice(), Smile::Upper)?,
        ))
    }
}

fn points_matrix(points: &[BoxVector]) -> Result<BoxMatrix> {
    let v = BoxMatrix::from_columns(points)?;
    if !v.is_square() {
        return Err(BoxError::dimension(format!(
            "{} points of dimension {}",
            points.len(),
            v.rows()
        )));
    }
    Ok(v)
}

/// `V` with row `i` replaced by all ones.
pub fn ones_row_replacement(v: &BoxMatrix, i: usize) -> Result<BoxMatrix> {
    v.replace_row(i, &vec![LimitScalar::one(); v.cols()])
}

pub fn hyperplane_through(points: &[BoxVector]) -> Result<LimitHyperplane> {
    hyperplane_through_with(points, &Enumeration::default())
}

pub fn hyperplane_through_with(points: &[BoxVector], config: &Enumeration) -> Result<LimitHyperplane> {
    let v = points_matrix(points)?;
    let rhs = PermutationProducts::compute_with(&v, config)?.limit();
    if rhs.is_zero() {
        return Err(BoxError::Degenerate(
            "the points have a zero limit determinant".into(),
        ));
    }
    let coeffs = (0..v.rows())
        .map(|i| Ok(PermutationProducts::compute_with(&ones_row_replacement(&v, i)?, config)?.limit()))
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitHyperplane {
        coeffs: BoxVector::new(coeffs)?,
        rhs,
    })
}

pub fn hyperplane_contains(h: &LimitHyperplane, x: &BoxVector) -> Result<bool> {
    if x.len() != h.dimension() {
        return Err(BoxError::dimension(format!(
            "point of length {} for a hyperplane in dimension {}",
            x.len(),
            h.dimension()
        )));
    }
    let (lower, upper) = h.forms(x)?;
    Ok(lower <= h.rhs && h.rhs <= upper)
}

/// The finite-p hyperplane through the same points: coefficients
/// `|V_(i)|_p` and right-hand side `|V|_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PHyperplane {
    pub p: PIndex,
    pub coeffs: Vec<SignedLog>,
    pub rhs: SignedLog,
}

impl PHyperplane {
    pub fn new(points: &[BoxVector], p: PIndex) -> Result<Self> {
        let v = points_matrix(points)?;
        let rhs = PermutationProducts::compute(&v)?.phi_p(p);
        let coeffs = (0..v.rows())
            .map(|i| Ok(PermutationProducts::compute(&ones_row_replacement(&v, i)?)?.phi_p(p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PHyperplane { p, coeffs, rhs })
    }

    /// `Σ φ_p(c_i x_i) - φ_p(rhs)`, left in the φ_p image.
    pub fn residual(&self, x: &BoxVector) -> Result<SignedLog> {
        Ok(signed_sum(&self.terms(x)?))
    }

    /// `|Σ φ_p(c_i x_i) - φ_p(rhs)|` relative to the largest term.
    pub fn relative_residual(&self, x: &BoxVector) -> Result<f64> {
        let terms = self.terms(x)?;
        let r = signed_sum(&terms);
        if r.is_zero() {
            return Ok(0.0);
        }
        let scale = terms.iter().map(|t| t.logmag()).fold(f64::NEG_INFINITY, f64::max);
        Ok((r.logmag() - scale).exp())
    }

    fn terms(&self, x: &BoxVector) -> Result<Vec<SignedLog>> {
        if x.len() != self.coeffs.len() {
            return Err(BoxError::dimension("point dimension differs from the hyperplane"));
        }
        let mut terms: Vec<SignedLog> = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(c, xi)| c.mul(SignedLog::from_scalar(xi)).phi(self.p))
            .collect();
        terms.push(self.rhs.neg().phi(self.p));
        Ok(terms)
    }
}
