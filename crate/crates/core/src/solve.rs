//! Limit systems `A ⌣-⊠ x ≤ b ≤ A ⌣+⊠ x`, their Cramer solutions, and
//! the nonnegative max-times and two-sided systems they contain.
//!
//! Infeasibility is reported as a value (`None` or an absent solution), never
//! as an error. Permutations are 0-based: `sigma[j]` is the column assigned to
//! row `j`.

use std::cmp::Ordering;

use crate::algebra::{boxminus, smile2, Smile};
use crate::error::{BoxError, Result};
use crate::linalg::{matvec_limit, BoxMatrix, BoxVector, PermutationProducts, ProductMode};
use crate::perm::Enumeration;
use crate::scalar::{LimitScalar, PIndex};
use crate::signed_log::{phi_p_sum_scalars, SignedLog};

/// A square system `(A, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitSystem {
    a: BoxMatrix,
    b: BoxVector,
}

impl LimitSystem {
    pub fn new(a: BoxMatrix, b: BoxVector) -> Result<Self> {
        if !a.is_square() {
            return Err(BoxError::dimension(format!(
                "limit systems need a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        check_len(&b, a.rows(), "right-hand side")?;
        Ok(LimitSystem { a, b })
    }

    pub fn matrix(&self) -> &BoxMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &BoxVector {
        &self.b
    }

    pub fn dimension(&self) -> usize {
        self.a.rows()
    }
}

fn check_len(v: &BoxVector, n: usize, what: &str) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(BoxError::dimension(format!("{what} has length {}, expected {n}", v.len())))
    }
}

/// Lower and upper row values of a limit system at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowCheck {
    pub lower: LimitScalar,
    pub upper: LimitScalar,
    pub satisfied: bool,
}

impl RowCheck {
    pub fn is_regular(&self) -> bool {
        self.lower == self.upper
    }
}

/// Row-by-row evaluation of `⟨a_i, x⟩⁻ ≤ b_i ≤ ⟨a_i, x⟩⁺`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub rows: Vec<RowCheck>,
}

impl Verification {
    pub fn satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    pub fn regular(&self) -> bool {
        self.rows.iter().all(RowCheck::is_regular)
    }

    pub fn lower(&self) -> Vec<LimitScalar> {
        self.rows.iter().map(|r| r.lower.clone()).collect()
    }

    pub fn upper(&self) -> Vec<LimitScalar> {
        self.rows.iter().map(|r| r.upper.clone()).collect()
    }
}

/// Outcome of a Cramer solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    /// Present exactly when `det ≠ 0`.
    pub solution: Option<BoxVector>,
    /// `|A|_∞`.
    pub det: LimitScalar,
    /// `|A^{(i)}|_∞`, column `i` replaced by the right-hand side.
    pub minors: Vec<LimitScalar>,
    /// Verification rows at the solution; empty without a solution.
    pub per_row: Vec<RowCheck>,
    pub regular: bool,
}

impl SolveReport {
    pub fn satisfied(&self) -> bool {
        self.solution.is_some() && self.per_row.iter().all(|r| r.satisfied)
    }
}

/// Cramer solution `x*_i = |A^{(i)}|_∞ / |A|_∞`.
pub fn cramer_limit_solve(sys: &LimitSystem) -> Result<SolveReport> {
    cramer_limit_solve_with(sys, &Enumeration::default())
}

pub fn cramer_limit_solve_with(sys: &LimitSystem, config: &Enumeration) -> Result<SolveReport> {
    let n = sys.dimension();
    let det = PermutationProducts::compute_with(&sys.a, config)?.limit();
    let minors = (0..n)
        .map(|i| {
            let ai = sys.a.replace_column(i, &sys.b)?;
            Ok(PermutationProducts::compute_with(&ai, config)?.limit())
        })
        .collect::<Result<Vec<_>>>()?;
    if det.is_zero() {
        return Ok(SolveReport {
            solution: None,
            det,
            minors,
            per_row: Vec::new(),
            regular: false,
        });
    }
    let x = BoxVector::new(minors.iter().map(|m| m / &det).collect())?;
    let check = verify_limit_system(sys, &x)?;
    Ok(SolveReport {
        regular: check.regular(),
        solution: Some(x),
        det,
        minors,
        per_row: check.rows,
    })
}

/// Evaluates both inequalities of every row at `x`.
pub fn verify_limit_system(sys: &LimitSystem, x: &BoxVector) -> Result<Verification> {
    check_len(x, sys.dimension(), "point")?;
    let lower = matvec_limit(&sys.a, x, ProductMode::Lower)?;
    let upper = matvec_limit(&sys.a, x, ProductMode::Upper)?;
    let rows = lower
        .iter()
        .zip(&upper)
        .zip(&sys.b)
        .map(|((lo, up), b)| RowCheck {
            satisfied: lo <= b && b <= up,
            lower: lo.clone(),
            upper: up.clone(),
        })
        .collect();
    Ok(Verification { rows })
}

/// Whether lower and upper row values coincide at `x` on every row.
pub fn is_regular(sys: &LimitSystem, x: &BoxVector) -> Result<bool> {
    Ok(verify_limit_system(sys, x)?.regular())
}

fn require_max_data(a: &BoxMatrix, b: &BoxVector) -> Result<()> {
    check_len(b, a.rows(), "right-hand side")?;
    if let Some(k) = a.entries().iter().position(LimitScalar::is_negative) {
        return Err(BoxError::domain(format!(
            "max systems need nonnegative entries; entry ({}, {}) is negative",
            k / a.cols() + 1,
            k % a.cols() + 1
        )));
    }
    if let Some(i) = b.iter().position(|x| !x.is_positive()) {
        return Err(BoxError::domain(format!(
            "max systems need a positive right-hand side; b_{} = {} (apply the zero right-hand side reduction first)",
            i + 1,
            b[i]
        )));
    }
    Ok(())
}

/// The componentwise-maximal candidate `x*_j = min_{i∈η(j)} b_i / a_{i,j}`.
pub fn maxsys_candidate(a: &BoxMatrix, b: &BoxVector) -> Result<BoxVector> {
    require_max_data(a, b)?;
    let x = (0..a.cols())
        .map(|j| {
            (0..a.rows())
                .filter(|&i| a.get(i, j).is_positive())
                .map(|i| &b[i] / a.get(i, j))
                .min()
                .ok_or_else(|| {
                    BoxError::domain(format!("column {} has no positive entry", j + 1))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    BoxVector::new(x)
}

fn row_max(a: &BoxMatrix, i: usize, x: &BoxVector) -> LimitScalar {
    a.row(i)
        .iter()
        .zip(x)
        .map(|(aij, xj)| aij * xj)
        .max()
        .unwrap_or_else(LimitScalar::zero)
}

/// Whether `max_j a_{i,j} x_j = b_i` holds for every row.
pub fn maxsys_satisfied(a: &BoxMatrix, b: &BoxVector, x: &BoxVector) -> Result<bool> {
    check_len(b, a.rows(), "right-hand side")?;
    check_len(x, a.cols(), "point")?;
    Ok((0..a.rows()).all(|i| row_max(a, i, x) == b[i]))
}

/// The maximal solution of `max_j a_{i,j} x_j = b_i`, or `None` when the
/// system is infeasible.
pub fn maxsys_solve(a: &BoxMatrix, b: &BoxVector) -> Result<Option<BoxVector>> {
    let x = maxsys_candidate(a, b)?;
    Ok(if maxsys_satisfied(a, b, &x)? { Some(x) } else { None })
}

/// A max system with its zero right-hand side rows removed.
///
/// A row with `b_i = 0` forces `x_j = 0` for every `j` with `a_{i,j} > 0`;
/// those columns and the zero rows are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroRhsReduction {
    /// The remaining system, absent when no row or no column is left.
    pub system: Option<(BoxMatrix, BoxVector)>,
    /// Original indices of the remaining rows.
    pub kept_rows: Vec<usize>,
    /// Original indices of the remaining columns.
    pub kept_cols: Vec<usize>,
    /// Columns fixed to zero.
    pub zero_cols: Vec<usize>,
    /// Number of columns of the original system.
    pub cols: usize,
}

impl ZeroRhsReduction {
    /// Lifts a solution of the reduced system back to the original
    /// variables, zero in the forced columns.
    pub fn expand(&self, reduced: &BoxVector) -> Result<BoxVector> {
        check_len(reduced, self.kept_cols.len(), "reduced solution")?;
        let mut x = vec![LimitScalar::zero(); self.cols];
        for (&j, v) in self.kept_cols.iter().zip(reduced) {
            x[j] = v.clone();
        }
        BoxVector::new(x)
    }
}

pub fn reduce_zero_rhs(a: &BoxMatrix, b: &BoxVector) -> Result<ZeroRhsReduction> {
    check_len(b, a.rows(), "right-hand side")?;
    if a.entries().iter().any(LimitScalar::is_negative) || b.iter().any(LimitScalar::is_negative) {
        return Err(BoxError::domain("max systems need nonnegative data"));
    }
    let zero_rows: Vec<usize> = (0..a.rows()).filter(|&i| b[i].is_zero()).collect();
    let (zero_cols, kept_cols): (Vec<usize>, Vec<usize>) = (0..a.cols())
        .partition(|&j| zero_rows.iter().any(|&i| a.get(i, j).is_positive()));
    let kept_rows: Vec<usize> = (0..a.rows()).filter(|&i| b[i].is_positive()).collect();
    let system = if kept_rows.is_empty() || kept_cols.is_empty() {
        None
    } else {
        let rows = kept_rows
            .iter()
            .map(|&i| kept_cols.iter().map(|&j| a.get(i, j).clone()).collect())
            .collect();
        let rhs = kept_rows.iter().map(|&i| b[i].clone()).collect();
        Some((BoxMatrix::from_rows(rows)?, BoxVector::new(rhs)?))
    };
    Ok(ZeroRhsReduction {
        system,
        kept_rows,
        kept_cols,
        zero_cols,
        cols: a.cols(),
    })
}

/// A permutation certifying solvability of a max system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistencePermutation {
    /// `sigma[j]` is the column assigned to row `j`.
    pub sigma: Vec<usize>,
    /// Whether every inequality holds strictly.
    pub strict: bool,
}

/// Bipartite eligibility: row `j` may take column `k` iff `a_{j,k} > 0` and
/// `j` maximizes `a_{i,k} / b_i` over `i`.
fn eligibility(a: &BoxMatrix, b: &BoxVector) -> Vec<Vec<bool>> {
    let n = a.rows();
    let ratio = |i: usize, k: usize| a.get(i, k) / &b[i];
    let best: Vec<LimitScalar> = (0..a.cols())
        .map(|k| (0..n).map(|i| ratio(i, k)).max().expect("nonempty"))
        .collect();
    (0..n)
        .map(|j| {
            (0..a.cols())
                .map(|k| a.get(j, k).is_positive() && ratio(j, k) == best[k])
                .collect()
        })
        .collect()
}

/// Maximum bipartite matching size over `rows`, restricted to unused
/// columns, by augmenting paths.
fn matching_size(eligible: &[Vec<bool>], rows: &[usize], used: &[bool]) -> usize {
    fn augment(
        r: usize,
        eligible: &[Vec<bool>],
        used: &[bool],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for k in 0..used.len() {
            if eligible[r][k] && !used[k] && !seen[k] {
                seen[k] = true;
                let free = match owner[k] {
                    None => true,
                    Some(other) => augment(other, eligible, used, seen, owner),
                };
                if free {
                    owner[k] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; used.len()];
    rows.iter()
        .filter(|&&r| {
            let mut seen = vec![false; used.len()];
            augment(r, eligible, used, &mut seen, &mut owner)
        })
        .count()
}

/// The lexicographically smallest permutation satisfying the solvability
/// inequalities, or `None` when no perfect matching exists.
pub fn maxsys_existence_permutation(
    a: &BoxMatrix,
    b: &BoxVector,
) -> Result<Option<ExistencePermutation>> {
    if !a.is_square() {
        return Err(BoxError::dimension("the existence permutation needs a square matrix"));
    }
    require_max_data(a, b)?;
    let n = a.rows();
    let eligible = eligibility(a, b);
    let mut used = vec![false; n];
    let mut sigma = Vec::with_capacity(n);
    for j in 0..n {
        let rest: Vec<usize> = (j + 1..n).collect();
        let choice = (0..n).find(|&k| {
            if !eligible[j][k] || used[k] {
                return false;
            }
            used[k] = true;
            let ok = matching_size(&eligible, &rest, &used) == rest.len();
            used[k] = false;
            ok
        });
        match choice {
            Some(k) => {
                used[k] = true;
                sigma.push(k);
            }
            None => return Ok(None),
        }
    }
    let strict = (0..n).all(|i| {
        (0..n)
            .filter(|&j| j != i)
            .all(|j| a.get(i, sigma[j]) * &b[j] / a.get(j, sigma[j]) < b[i])
    });
    Ok(Some(ExistencePermutation { sigma, strict }))
}

/// `b_i > Σ_{j≠i} a_{i,j} b_j / a_{j,j}` for every row.
pub fn kaykobad_check(a: &BoxMatrix, b: &BoxVector) -> Result<bool> {
    if !a.is_square() {
        return Err(BoxError::dimension("the Kaykobad condition needs a square matrix"));
    }
    require_max_data(a, b)?;
    let n = a.rows();
    if let Some(i) = (0..n).find(|&i| !a.get(i, i).is_positive()) {
        return Err(BoxError::domain(format!("diagonal entry a_{0}{0} is not positive", i + 1)));
    }
    Ok((0..n).all(|i| {
        let off: LimitScalar = (0..n)
            .filter(|&j| j != i)
            .map(|j| a.get(i, j) * &b[j] / a.get(j, j))
            .sum();
        b[i] > off
    }))
}

/// The φ_p condition `b_i > (Σ_{j≠i} (a_{i,σ(j)} b_j / a_{j,σ(j)})^{2p+1})^{1/(2p+1)}`.
pub fn kaykobad_p_check(a: &BoxMatrix, b: &BoxVector, sigma: &[usize], p: PIndex) -> Result<bool> {
    if !a.is_square() {
        return Err(BoxError::dimension("the Kaykobad condition needs a square matrix"));
    }
    require_max_data(a, b)?;
    let n = a.rows();
    check_permutation(sigma, n)?;
    if let Some(j) = (0..n).find(|&j| !a.get(j, sigma[j]).is_positive()) {
        return Err(BoxError::domain(format!(
            "pivot a_{},{} is zero",
            j + 1,
            sigma[j] + 1
        )));
    }
    Ok((0..n).all(|i| {
        let terms: Vec<LimitScalar> = (0..n)
            .filter(|&j| j != i)
            .map(|j| a.get(i, sigma[j]) * &b[j] / a.get(j, sigma[j]))
            .collect();
        let rhs = phi_p_sum_scalars(&terms, p);
        SignedLog::from_scalar(&b[i]).cmp_value(rhs) == Ordering::Greater
    }))
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if sigma.len() != n {
        return Err(BoxError::domain(format!("permutation of length {} for n = {n}", sigma.len())));
    }
    for &k in sigma {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return Err(BoxError::domain(format!("{sigma:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// The two-sided system
/// `(A ⌣-⊠ x) ⌣- d ≤ (C ⌣-⊠ x) ⌣- b` and `(A ⌣+⊠ x) ⌣+ d ≥ (C ⌣+⊠ x) ⌣+ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedSystem {
    a: BoxMatrix,
    c: BoxMatrix,
    b: BoxVector,
    d: BoxVector,
}

impl TwoSidedSystem {
    pub fn new(a: BoxMatrix, c: BoxMatrix, b: BoxVector, d: BoxVector) -> Result<Self> {
        if !a.is_square() || a.rows() != c.rows() || a.cols() != c.cols() {
            return Err(BoxError::dimension("two-sided systems need square matrices of equal size"));
        }
        check_len(&b, a.rows(), "b")?;
        check_len(&d, a.rows(), "d")?;
        Ok(TwoSidedSystem { a, c, b, d })
    }

    /// `D = A ⊟ C` and `r = b ⊟ d`.
    pub fn reduced(&self) -> LimitSystem {
        let dm = self.a.zip_with(&self.c, boxminus).expect("shapes checked");
        let r = BoxVector::new(self.b.iter().zip(&self.d).map(|(x, y)| boxminus(x, y)).collect())
            .expect("nonempty");
        LimitSystem { a: dm, b: r }
    }
}

/// The four row values of a two-sided system at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedRow {
    /// `(A ⌣-⊠ x)_i ⌣- d_i`.
    pub a_lower: LimitScalar,
    /// `(C ⌣-⊠ x)_i ⌣- b_i`.
    pub c_lower: LimitScalar,
    /// `(A ⌣+⊠ x)_i ⌣+ d_i`.
    pub a_upper: LimitScalar,
    /// `(C ⌣+⊠ x)_i ⌣+ b_i`.
    pub c_upper: LimitScalar,
}

impl TwoSidedRow {
    pub fn satisfied(&self) -> bool {
        self.a_lower <= self.c_lower && self.a_upper >= self.c_upper
    }

    pub fn regular(&self) -> bool {
        self.a_lower == self.a_upper && self.c_lower == self.c_upper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedReport {
    pub d_matrix: BoxMatrix,
    pub r_vector: BoxVector,
    /// Cramer solve of the reduced system `(D, r)`.
    pub reduced: SolveReport,
    /// Rows of the original system at the solution; empty without one.
    pub rows: Vec<TwoSidedRow>,
}

impl TwoSidedReport {
    pub fn solution(&self) -> Option<&BoxVector> {
        self.reduced.solution.as_ref()
    }

    pub fn satisfied(&self) -> bool {
        self.reduced.solution.is_some() && self.rows.iter().all(TwoSidedRow::satisfied)
    }

    pub fn regular(&self) -> bool {
        self.reduced.solution.is_some() && self.rows.iter().all(TwoSidedRow::regular)
    }
}

pub fn twosided_rows(sys: &TwoSidedSystem, x: &BoxVector) -> Result<Vec<TwoSidedRow>> {
    check_len(x, sys.a.cols(), "point")?;
    let al = matvec_limit(&sys.a, x, ProductMode::Lower)?;
    let au = matvec_limit(&sys.a, x, ProductMode::Upper)?;
    let cl = matvec_limit(&sys.c, x, ProductMode::Lower)?;
    let cu = matvec_limit(&sys.c, x, ProductMode::Upper)?;
    Ok((0..x.len())
        .map(|i| TwoSidedRow {
            a_lower: smile2(&al[i], &sys.d[i], Smile::Lower),
            c_lower: smile2(&cl[i], &sys.b[i], Smile::Lower),
            a_upper: smile2(&au[i], &sys.d[i], Smile::Upper),
            c_upper: smile2(&cu[i], &sys.b[i], Smile::Upper),
        })
        .collect())
}

/// Cramer solution of `(A ⊟ C, b ⊟ d)`, checked against the original
/// two-sided inequalities.
pub fn twosided_solve(sys: &TwoSidedSystem) -> Result<TwoSidedReport> {
    twosided_solve_with(sys, &Enumeration::default())
}

pub fn twosided_solve_with(sys: &TwoSidedSystem, config: &Enumeration) -> Result<TwoSidedReport> {
    let reduced_sys = sys.reduced();
    let reduced = cramer_limit_solve_with(&reduced_sys, config)?;
    let rows = match &reduced.solution {
        Some(x) => twosided_rows(sys, x)?,
        None => Vec::new(),
    };
    Ok(TwoSidedReport {
        d_matrix: reduced_sys.a,
        r_vector: reduced_sys.b,
        reduced,
        rows,
    })
}

pub fn twosided_is_regular(sys: &TwoSidedSystem, x: &BoxVector) -> Result<bool> {
    Ok(twosided_rows(sys, x)?.iter().all(TwoSidedRow::regular))
}
