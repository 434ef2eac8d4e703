//! Dense matrices over exact rationals, the limit matrix products and the
//! Leibniz-form determinants.
//!
//! Indices in this module are 0-based.

use std::fmt;
use std::ops::Index;

use crate::algebra::{inner_limit, inner_smile, nary_boxplus, smile, Smile};
use crate::error::{BoxError, Result};
use crate::perm::{exact_product, map_permutations, Enumeration};
use crate::scalar::{LimitScalar, PIndex};
use crate::signed_log::{phi_p_sum, SignedLog};

/// A nonempty vector of exact scalars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxVector(Vec<LimitScalar>);

impl BoxVector {
    pub fn new(entries: Vec<LimitScalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(BoxError::dimension("vectors must be nonempty"));
        }
        Ok(BoxVector(entries))
    }

    /// Panics on an empty slice.
    pub fn from_ints(values: &[i64]) -> Self {
        BoxVector::new(values.iter().map(|&v| LimitScalar::from_int(v)).collect())
            .expect("nonempty vector")
    }

    pub fn zeros(n: usize) -> Self {
        BoxVector(vec![LimitScalar::zero(); n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[LimitScalar] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LimitScalar> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<LimitScalar> {
        self.0
    }

    pub fn scale(&self, alpha: &LimitScalar) -> BoxVector {
        BoxVector(self.0.iter().map(|x| x * alpha).collect())
    }

    pub fn neg(&self) -> BoxVector {
        BoxVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn abs(&self) -> BoxVector {
        BoxVector(self.0.iter().map(LimitScalar::abs).collect())
    }
}

impl Index<usize> for BoxVector {
    type Output = LimitScalar;

    fn index(&self, i: usize) -> &LimitScalar {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a BoxVector {
    type Item = &'a LimitScalar;
    type IntoIter = std::slice::Iter<'a, LimitScalar>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for BoxVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A dense row-major matrix with positive dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LimitScalar>,
}

impl BoxMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<LimitScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(BoxError::dimension("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(BoxError::dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(BoxMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<LimitScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(BoxError::dimension(format!(
                "row {bad} has {} entries, expected {c}",
                rows[bad].len()
            )));
        }
        BoxMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Panics on ragged or empty input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        BoxMatrix::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| LimitScalar::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular integer matrix")
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    LimitScalar::one()
                } else {
                    LimitScalar::zero()
                }
            })
            .collect();
        BoxMatrix::new(n, n, entries).expect("positive dimension")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BoxMatrix::new(rows, cols, vec![LimitScalar::zero(); rows * cols])
            .expect("positive dimensions")
    }

    pub fn from_columns(columns: &[BoxVector]) -> Result<Self> {
        let n = columns.first().map_or(0, BoxVector::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(BoxError::dimension("columns of differing lengths"));
        }
        let rows: Vec<Vec<LimitScalar>> = (0..n)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        BoxMatrix::from_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LimitScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[LimitScalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> BoxVector {
        BoxVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[LimitScalar]> {
        self.entries.chunks(self.cols)
    }

    pub fn entries(&self) -> &[LimitScalar] {
        &self.entries
    }

    pub fn map<F: Fn(&LimitScalar) -> LimitScalar>(&self, f: F) -> BoxMatrix {
        BoxMatrix {
            entries: self.entries.iter().map(f).collect(),
            ..*self
        }
    }

    /// Entrywise combination of two matrices of the same shape.
    pub fn zip_with<F>(&self, other: &BoxMatrix, f: F) -> Result<BoxMatrix>
    where
        F: Fn(&LimitScalar, &LimitScalar) -> LimitScalar,
    {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(BoxError::dimension(format!(
                "{}x{} and {}x{} matrices",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(BoxMatrix {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
            ..*self
        })
    }

    pub fn transpose(&self) -> BoxMatrix {
        let entries = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        BoxMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// The matrix with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Result<BoxMatrix> {
        if self.rows < 2 || self.cols < 2 {
            return Err(BoxError::domain("minors need at least two rows and columns"));
        }
        if i >= self.rows || j >= self.cols {
            return Err(BoxError::domain(format!("minor ({i}, {j}) out of range")));
        }
        let entries = (0..self.rows)
            .filter(|&r| r != i)
            .flat_map(|r| (0..self.cols).filter(move |&c| c != j).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c).clone())
            .collect();
        BoxMatrix::new(self.rows - 1, self.cols - 1, entries)
    }

    /// Copy with column `j` replaced by `b`.
    pub fn replace_column(&self, j: usize, b: &BoxVector) -> Result<BoxMatrix> {
        if j >= self.cols {
            return Err(BoxError::domain(format!(
                "column {j} out of range for {} columns",
                self.cols
            )));
        }
        if b.len() != self.rows {
            return Err(BoxError::dimension(format!(
                "column of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut out = self.clone();
        for (i, x) in b.iter().enumerate() {
            out.entries[i * self.cols + j] = x.clone();
        }
        Ok(out)
    }

    /// Copy with row `i` replaced by `r`.
    pub fn replace_row(&self, i: usize, r: &[LimitScalar]) -> Result<BoxMatrix> {
        if i >= self.rows {
            return Err(BoxError::domain(format!("row {i} out of range for {} rows", self.rows)));
        }
        if r.len() != self.cols {
            return Err(BoxError::dimension(format!(
                "row of length {} for {} columns",
                r.len(),
                self.cols
            )));
        }
        let mut out = self.clone();
        out.entries[i * self.cols..(i + 1) * self.cols].clone_from_slice(r);
        Ok(out)
    }

    /// Copy with the columns reordered: column `j` of the result is column
    /// `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<BoxMatrix> {
        if perm.len() != self.cols {
            return Err(BoxError::dimension("permutation length differs from column count"));
        }
        let entries = (0..self.rows)
            .flat_map(|i| perm.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        BoxMatrix::new(self.rows, self.cols, entries)
    }

    fn require_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(BoxError::domain(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }
}

impl fmt::Display for BoxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, row) in self.row_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

/// How rows are aggregated in a limit matrix product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductMode {
    /// `⊠`: n-ary boxplus of the termwise products.
    Exact,
    /// `⌣- ⊠`.
    Lower,
    /// `⌣+ ⊠`.
    Upper,
}

fn aggregate_row(a: &[LimitScalar], x: &[LimitScalar], mode: ProductMode) -> Result<LimitScalar> {
    match mode {
        ProductMode::Exact => inner_limit(a, x),
        ProductMode::Lower => inner_smile(a, x, Smile::Lower),
        ProductMode::Upper => inner_smile(a, x, Smile::Upper),
    }
}

/// `A ⊠ B`, `A ⌣-⊠ B` or `A ⌣+⊠ B` for rectangular matrices.
pub fn matmul_limit(a: &BoxMatrix, b: &BoxMatrix, mode: ProductMode) -> Result<BoxMatrix> {
    if a.cols != b.rows {
        return Err(BoxError::dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let columns: Vec<BoxVector> = (0..b.cols).map(|j| b.column(j)).collect();
    let mut entries = Vec::with_capacity(a.rows * b.cols);
    for row in a.row_iter() {
        for col in &columns {
            entries.push(aggregate_row(row, col.as_slice(), mode)?);
        }
    }
    BoxMatrix::new(a.rows, b.cols, entries)
}

/// `A ⊠ x` and its regularized versions.
pub fn matvec_limit(a: &BoxMatrix, x: &BoxVector, mode: ProductMode) -> Result<BoxVector> {
    if a.cols != x.len() {
        return Err(BoxError::dimension(format!(
            "cannot multiply {}x{} by a vector of length {}",
            a.rows,
            a.cols,
            x.len()
        )));
    }
    let out: Result<Vec<LimitScalar>> = a
        .row_iter()
        .map(|row| aggregate_row(row, x.as_slice(), mode))
        .collect();
    BoxVector::new(out?)
}

/// The multiset of signed Leibniz products `sgn(σ) Π a_{i,σ(i)}`, one per
/// permutation. Computed once and shared by every determinant flavor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationProducts {
    n: usize,
    products: Vec<LimitScalar>,
}

impl PermutationProducts {
    pub fn compute(a: &BoxMatrix) -> Result<Self> {
        Self::compute_with(a, &Enumeration::default())
    }

    pub fn compute_with(a: &BoxMatrix, config: &Enumeration) -> Result<Self> {
        let n = a.require_square("a determinant")?;
        config.check(n)?;
        let columns: Vec<usize> = (0..n).collect();
        let products = map_permutations(&columns, config.execution, |sigma, even| {
            let prod = exact_product(sigma.iter().enumerate().map(|(i, &j)| a.get(i, j)));
            if even {
                prod
            } else {
                -prod
            }
        });
        Ok(PermutationProducts { n, products })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn products(&self) -> &[LimitScalar] {
        &self.products
    }

    /// `|A|_∞`.
    pub fn limit(&self) -> LimitScalar {
        nary_boxplus(&self.products)
    }

    /// Regularized determinant.
    pub fn smile(&self, mode: Smile) -> LimitScalar {
        smile(&self.products, mode)
    }

    /// `|A|_p`. The products are exact, so balanced configurations yield the
    /// exact zero at every `p`.
    pub fn phi_p(&self, p: PIndex) -> SignedLog {
        let logs: Vec<SignedLog> = self.products.iter().map(SignedLog::from_scalar).collect();
        phi_p_sum(&logs, p)
    }

    /// The classical determinant (`p = 0`), exactly.
    pub fn classical(&self) -> LimitScalar {
        self.products.iter().cloned().sum()
    }
}

/// `|A|_p = φ_p⁻¹ |Φ_p(A)|`.
pub fn det_p(a: &BoxMatrix, p: PIndex) -> Result<SignedLog> {
    Ok(PermutationProducts::compute(a)?.phi_p(p))
}

pub fn det_p_with(a: &BoxMatrix, p: PIndex, config: &Enumeration) -> Result<SignedLog> {
    Ok(PermutationProducts::compute_with(a, config)?.phi_p(p))
}

/// `|A|_∞`, the n-ary boxplus of the signed permutation products.
pub fn det_inf(a: &BoxMatrix) -> Result<LimitScalar> {
    Ok(PermutationProducts::compute(a)?.limit())
}

pub fn det_inf_with(a: &BoxMatrix, config: &Enumeration) -> Result<LimitScalar> {
    Ok(PermutationProducts::compute_with(a, config)?.limit())
}

/// Lower or upper semi-continuous determinant.
pub fn det_inf_reg(a: &BoxMatrix, mode: Smile) -> Result<LimitScalar> {
    Ok(PermutationProducts::compute(a)?.smile(mode))
}

pub fn det_inf_reg_with(a: &BoxMatrix, mode: Smile, config: &Enumeration) -> Result<LimitScalar> {
    Ok(PermutationProducts::compute_with(a, config)?.smile(mode))
}

/// The limit cofactor matrix `((-1)^{i+j} |A_{i,j}|_∞)`.
pub fn cofactor_inf(a: &BoxMatrix) -> Result<BoxMatrix> {
    cofactor_inf_with(a, &Enumeration::default())
}

pub fn cofactor_inf_with(a: &BoxMatrix, config: &Enumeration) -> Result<BoxMatrix> {
    let n = a.require_square("a cofactor matrix")?;
    if n < 2 {
        return Err(BoxError::domain("cofactor matrix needs n >= 2"));
    }
    config.check(n - 1)?;
    let entries = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let d = det_inf_with(&a.minor(i, j)?, config)?;
            Ok(if (i + j) % 2 == 0 { d } else { -d })
        })
        .collect::<Result<Vec<_>>>()?;
    BoxMatrix::new(n, n, entries)
}

/// `(e₁* ∧∞ ... ∧∞ eₙ*)(v₁, ..., vₙ)`: the limit determinant of the matrix
/// with columns `vs`.
pub fn wedge_eval(vs: &[BoxVector]) -> Result<LimitScalar> {
    let m = BoxMatrix::from_columns(vs)?;
    if !m.is_square() {
        return Err(BoxError::dimension(format!(
            "{} vectors of length {}",
            vs.len(),
            m.rows()
        )));
    }
    det_inf(&m)
}
