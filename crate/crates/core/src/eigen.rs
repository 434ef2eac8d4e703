//! Limit characteristic polynomials and eigenvalues in limit.
//!
//! `P_A^{(p)}(λ)` is the φ_p-sum of one monomial per partial permutation:
//! for every subset `H` of the rows and every permutation `σ` of `H`, the
//! monomial `(-1)^{n-k} sgn(σ) Π_{i∈H} a_{i,σ(i)} λ^{n-k}` with `k = |H|`.
//! The list is kept as a multiset; merging equal degrees would change the
//! boxplus counts.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::algebra::{aggregate, Aggregated, Aggregation};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow};

use crate::error::{BoxError, Result};
use crate::linalg::{matvec_limit, BoxMatrix, BoxVector, ProductMode};
use crate::parallel::Execution;
use crate::perm::{exact_product, factorial, map_permutations, Enumeration, DEFAULT_CHARPOLY_CAP};
use crate::scalar::{LimitScalar, PIndex};
use crate::signed_log::{log_sum_exp, phi_p_sum, SignedLog};

/// Relative log-magnitude tolerance for ties at irrational candidates.
pub const DEFAULT_REGION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: LimitScalar,
    pub degree: u32,
}

impl Monomial {
    pub fn eval(&self, lambda: &LimitScalar) -> LimitScalar {
        &self.coeff * lambda.pow(self.degree)
    }

    /// `c · λ^d` at a float `λ`, in signed-log form.
    pub fn eval_log(&self, lambda: f64) -> SignedLog {
        let power = if self.degree == 0 {
            SignedLog::ONE
        } else {
            let l = SignedLog::from_f64(lambda);
            if l.is_zero() {
                return SignedLog::ZERO;
            }
            let sign = if l.sign() < 0 && self.degree % 2 == 1 { -1 } else { 1 };
            SignedLog::from_parts(sign, l.logmag() * self.degree as f64)
        };
        SignedLog::from_scalar(&self.coeff).mul(power)
    }
}

/// The characteristic monomial multiset of an `n x n` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialList {
    n: usize,
    monomials: Vec<Monomial>,
}

/// `q_n = Σ_k k! C(n, k)`.
pub fn monomial_count(n: usize) -> usize {
    (0..=n).map(|k| factorial(k) * binomial(n, k)).sum()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn char_monomials(a: &BoxMatrix) -> Result<MonomialList> {
    char_monomials_with(a, &Enumeration::with_cap(DEFAULT_CHARPOLY_CAP))
}

pub fn char_monomials_with(a: &BoxMatrix, config: &Enumeration) -> Result<MonomialList> {
    if !a.is_square() {
        return Err(BoxError::domain(format!(
            "characteristic polynomials need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    config.check(n)?;
    let subsets: Vec<Vec<usize>> = (0..=n).flat_map(|k| combinations(n, k)).collect();
    let monomials = config.execution.flat_map(subsets.len(), |s| {
        let h = &subsets[s];
        let degree = (n - h.len()) as u32;
        let outer_negative = degree % 2 == 1;
        map_permutations(h, Execution::Sequential, |image, even| {
            let prod = exact_product(h.iter().zip(image).map(|(&i, &j)| a.get(i, j)));
            let coeff = if even != outer_negative { prod } else { -prod };
            Monomial { coeff, degree }
        })
    });
    debug_assert_eq!(monomials.len(), monomial_count(n));
    Ok(MonomialList { n, monomials })
}

impl MonomialList {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// The values `c · λ^d` of every monomial.
    pub fn values_at(&self, lambda: &LimitScalar) -> Vec<LimitScalar> {
        self.monomials.iter().map(|m| m.eval(lambda)).collect()
    }

    /// The multiset with every pair of identical monomials of opposite sign
    /// removed. Such pairs cancel in `P^{(p)}` for every `p` and every `λ`.
    pub fn reduced(&self) -> Vec<Monomial> {
        let mut net: BTreeMap<(u32, LimitScalar), i64> = BTreeMap::new();
        for m in &self.monomials {
            if !m.coeff.is_zero() {
                *net.entry((m.degree, m.coeff.abs())).or_default() += m.coeff.signum() as i64;
            }
        }
        net.into_iter()
            .flat_map(|((degree, mag), count)| {
                let coeff = if count > 0 { mag } else { -mag };
                std::iter::repeat_n(Monomial { coeff, degree }, count.unsigned_abs() as usize)
            })
            .collect()
    }

    /// Coefficients of the degree-0 monomials.
    pub fn constant_terms(&self) -> Vec<LimitScalar> {
        self.monomials
            .iter()
            .filter(|m| m.degree == 0)
            .map(|m| m.coeff.clone())
            .collect()
    }
}

/// Evaluates the characteristic polynomial at `λ`: φ_p-sum, limit, or the
/// lower/upper regularizations.
pub fn charpoly_eval(m: &MonomialList, lambda: &LimitScalar, how: Aggregation) -> Aggregated {
    match how {
        Aggregation::Lower | Aggregation::Upper => {
            let values: Vec<LimitScalar> = m.reduced().iter().map(|x| x.eval(lambda)).collect();
            aggregate(&values, how)
        }
        _ => aggregate(&m.values_at(lambda), how),
    }
}

/// `P^{(p)}(λ)` at a float `λ`.
pub fn charpoly_eval_p_f64(m: &MonomialList, lambda: f64, p: PIndex) -> SignedLog {
    let values: Vec<SignedLog> = m.reduced().iter().map(|x| x.eval_log(lambda)).collect();
    phi_p_sum(&values, p)
}

/// `P_-(λ) ≤ 0 ≤ P_+(λ)`, exactly.
pub fn in_region(m: &MonomialList, lambda: &LimitScalar) -> bool {
    let values: Vec<LimitScalar> = m.reduced().iter().map(|x| x.eval(lambda)).collect();
    let lower = aggregate(&values, Aggregation::Lower).exact().expect("exact");
    let upper = aggregate(&values, Aggregation::Upper).exact().expect("exact");
    !lower.is_positive() && !upper.is_negative()
}

/// Membership at a float `λ`: the largest magnitudes, up to a relative
/// log tolerance, must carry both signs (or every value must vanish).
pub fn in_region_f64(reduced: &[Monomial], lambda: f64, rel_tol: f64) -> bool {
    let values: Vec<SignedLog> = reduced
        .iter()
        .map(|x| x.eval_log(lambda))
        .filter(|v| !v.is_zero())
        .collect();
    let Some(top) = values.iter().map(|v| v.logmag()).max_by(f64::total_cmp) else {
        return true;
    };
    let tol = rel_tol * top.abs().max(1.0);
    let near = values.iter().filter(|v| top - v.logmag() <= tol);
    let (mut pos, mut neg) = (false, false);
    for v in near {
        if v.sign() > 0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    pos && neg
}

/// A point of the eigen region, exact when it is rational.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionValue {
    Exact(LimitScalar),
    Approx(f64),
}

impl RegionValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            RegionValue::Exact(x) => x.to_f64(),
            RegionValue::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RegionValue::Exact(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub value: RegionValue,
    /// Whether `λ` is also an eigenvalue of the max-times product `A ⊠ v = λ v`
    /// with `v ≥ 0`; `None` when this cannot be decided (mixed-sign matrix
    /// or irrational `λ`).
    pub boxtimes_eigenvalue: Option<bool>,
}

/// An open interval of the region found by sampling between candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionInterval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenRegion {
    /// The reduced polynomial is identically zero: every real is in the
    /// region.
    pub all_reals: bool,
    pub points: Vec<RegionPoint>,
    pub intervals: Vec<RegionInterval>,
}

impl EigenRegion {
    pub fn contains_exact(&self, lambda: &LimitScalar) -> bool {
        self.all_reals
            || self
                .points
                .iter()
                .any(|p| matches!(&p.value, RegionValue::Exact(x) if x == lambda))
    }

    pub fn contains_approx(&self, lambda: f64, rel_tol: f64) -> bool {
        self.all_reals
            || self
                .points
                .iter()
                .any(|p| (p.value.to_f64() - lambda).abs() <= rel_tol * lambda.abs().max(1.0))
            || self.intervals.iter().any(|i| i.low < lambda && lambda < i.high)
    }

    pub fn max_point(&self) -> Option<&RegionPoint> {
        self.points
            .iter()
            .max_by(|a, b| a.value.to_f64().total_cmp(&b.value.to_f64()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionOptions {
    pub rel_tol: f64,
    pub enumeration: Enumeration,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            rel_tol: DEFAULT_REGION_TOLERANCE,
            enumeration: Enumeration::with_cap(DEFAULT_CHARPOLY_CAP),
        }
    }
}

/// Magnitudes at which two reduced monomials of different degrees tie.
fn tie_magnitudes(reduced: &[Monomial]) -> Vec<RegionValue> {
    // a monomial can only be among the largest if its |c| is the largest of
    // its degree
    let mut best: BTreeMap<u32, LimitScalar> = BTreeMap::new();
    for m in reduced {
        let mag = m.coeff.abs();
        best.entry(m.degree)
            .and_modify(|b| {
                if mag > *b {
                    *b = mag.clone();
                }
            })
            .or_insert(mag);
    }
    let classes: Vec<(u32, LimitScalar)> = best.into_iter().collect();
    let mut out = Vec::new();
    for (i, (di, ci)) in classes.iter().enumerate() {
        for (dj, cj) in &classes[i + 1..] {
            // |ci| t^di = |cj| t^dj with dj > di
            let ratio = ci / cj;
            let k = dj - di;
            out.push(match ratio.exact_root(k) {
                Some(t) => RegionValue::Exact(t),
                None => RegionValue::Approx((ratio.ln_abs() / k as f64).exp()),
            });
        }
    }
    out
}

/// The eigenvalues in limit of `A`: every `λ` with `P_-(λ) ≤ 0 ≤ P_+(λ)`.
///
/// Candidates are `0` and the magnitude ties between monomials of different
/// degrees on both half-lines; rational candidates are decided exactly,
/// irrational ones with a relative log tolerance. Midpoints between
/// consecutive candidates are sampled to detect intervals.
pub fn eigen_region(a: &BoxMatrix, opts: &RegionOptions) -> Result<EigenRegion> {
    let m = char_monomials_with(a, &opts.enumeration)?;
    let reduced = m.reduced();
    if reduced.is_empty() {
        return Ok(EigenRegion {
            all_reals: true,
            points: Vec::new(),
            intervals: Vec::new(),
        });
    }
    let mut candidates = vec![RegionValue::Exact(LimitScalar::zero())];
    for t in tie_magnitudes(&reduced) {
        match t {
            RegionValue::Exact(x) => {
                candidates.push(RegionValue::Exact(-&x));
                candidates.push(RegionValue::Exact(x));
            }
            RegionValue::Approx(x) => {
                candidates.push(RegionValue::Approx(-x));
                candidates.push(RegionValue::Approx(x));
            }
        }
    }
    candidates.sort_by(|x, y| x.to_f64().total_cmp(&y.to_f64()));
    candidates.dedup_by(|x, y| match (&*x, &*y) {
        (RegionValue::Exact(p), RegionValue::Exact(q)) => p == q,
        _ => (x.to_f64() - y.to_f64()).abs() <= opts.rel_tol * y.to_f64().abs().max(1.0),
    });

    let nonnegative = a.entries().iter().all(|x| !x.is_negative());
    let points: Vec<RegionPoint> = candidates
        .iter()
        .filter(|c| match c {
            RegionValue::Exact(x) => in_region(&m, x),
            RegionValue::Approx(x) => in_region_f64(&reduced, *x, opts.rel_tol),
        })
        .map(|c| RegionPoint {
            boxtimes_eigenvalue: match c {
                RegionValue::Exact(x) if nonnegative => Some(boxtimes_eigenvector(a, x).is_some()),
                _ => None,
            },
            value: c.clone(),
        })
        .collect();

    let xs: Vec<f64> = candidates.iter().map(RegionValue::to_f64).collect();
    let mut probes: Vec<(f64, f64, f64)> = xs
        .windows(2)
        .map(|w| (w[0], w[1], 0.5 * (w[0] + w[1])))
        .collect();
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let span = (hi - lo).abs().max(1.0);
    probes.push((f64::NEG_INFINITY, lo, lo - span));
    probes.push((hi, f64::INFINITY, hi + span));
    let intervals = probes
        .into_iter()
        .filter(|&(_, _, mid)| in_region_f64(&reduced, mid, opts.rel_tol))
        .map(|(low, high, _)| RegionInterval { low, high })
        .collect();

    Ok(EigenRegion {
        all_reals: false,
        points,
        intervals,
    })
}

/// `A ⊠ v = λ v`, exactly.
pub fn boxtimes_eig_check(a: &BoxMatrix, lambda: &LimitScalar, v: &BoxVector) -> Result<bool> {
    if v.iter().all(LimitScalar::is_zero) {
        return Err(BoxError::domain("eigenvectors must be nonzero"));
    }
    Ok(matvec_limit(a, v, ProductMode::Exact)? == v.scale(lambda))
}

/// A nonnegative `v ≠ 0` with `A ⊠ v = λ v` for a nonnegative matrix, if one
/// exists.
///
/// For `λ > 0` the candidates are the columns of the max-times Kleene star of
/// `A / λ` restricted to the nodes that reach a node on a cycle of mean
/// exactly `λ`; each candidate is checked exactly.
pub fn boxtimes_eigenvector(a: &BoxMatrix, lambda: &LimitScalar) -> Option<BoxVector> {
    if !a.is_square() || a.entries().iter().any(LimitScalar::is_negative) {
        return None;
    }
    let n = a.rows();
    if lambda.is_negative() {
        return None;
    }
    if lambda.is_zero() {
        return (0..n)
            .find(|&j| a.column(j).iter().all(LimitScalar::is_zero))
            .map(|j| unit(n, j));
    }
    let b = a.map(|x| x / lambda);
    let reach = reachability(&b);
    (0..n).find_map(|k| {
        let nodes: Vec<usize> = (0..n).filter(|&i| i == k || reach[i][k]).collect();
        let star = max_times_closure(&b, &nodes);
        let kk = nodes.iter().position(|&i| i == k).expect("k is a node");
        if star[kk][kk] != LimitScalar::one() {
            return None;
        }
        if (0..nodes.len()).any(|i| star[i][i] > LimitScalar::one()) {
            return None;
        }
        let mut v = vec![LimitScalar::zero(); n];
        for (i, &node) in nodes.iter().enumerate() {
            v[node] = if node == k {
                LimitScalar::one()
            } else {
                star[i][kk].clone()
            };
        }
        let v = BoxVector::new(v).ok()?;
        boxtimes_eig_check(a, lambda, &v).ok()?.then_some(v)
    })
}

fn unit(n: usize, j: usize) -> BoxVector {
    BoxVector::new(
        (0..n)
            .map(|i| if i == j { LimitScalar::one() } else { LimitScalar::zero() })
            .collect(),
    )
    .expect("nonempty")
}

fn reachability(b: &BoxMatrix) -> Vec<Vec<bool>> {
    let n = b.rows();
    let mut r: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| b.get(i, j).is_positive()).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Best path products of length ≥ 1 within `nodes` (max-times
/// Floyd-Warshall).
fn max_times_closure(b: &BoxMatrix, nodes: &[usize]) -> Vec<Vec<LimitScalar>> {
    let m = nodes.len();
    let mut d: Vec<Vec<LimitScalar>> = nodes
        .iter()
        .map(|&i| nodes.iter().map(|&j| b.get(i, j).clone()).collect())
        .collect();
    for k in 0..m {
        for i in 0..m {
            if d[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                let via = &d[i][k] * &d[k][j];
                if via > d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// The largest geometric cycle mean `max_C (Π_{(i,j)∈C} a_ij)^{1/|C|}` of a
/// nonnegative matrix, exact when the maximizing root is rational.
pub fn max_cycle_mean(a: &BoxMatrix) -> Result<RegionValue> {
    if !a.is_square() || a.entries().iter().any(LimitScalar::is_negative) {
        return Err(BoxError::domain("cycle means need a square nonnegative matrix"));
    }
    let n = a.rows();
    let mut power = a.clone();
    let mut best: Option<(f64, RegionValue)> = None;
    for k in 1..=n as u32 {
        if k > 1 {
            power = max_times_product(&power, a);
        }
        let diag = (0..n).map(|i| power.get(i, i).clone()).fold(LimitScalar::zero(), LimitScalar::max);
        if diag.is_zero() {
            continue;
        }
        let log = diag.ln_abs() / k as f64;
        let value = match diag.exact_root(k) {
            Some(r) => RegionValue::Exact(r),
            None => RegionValue::Approx(log.exp()),
        };
        let replace = match &best {
            None => true,
            Some((b, RegionValue::Exact(_))) => log > b + 1e-12 * b.abs().max(1.0),
            Some((b, RegionValue::Approx(_))) => {
                log > b + 1e-12 * b.abs().max(1.0) || (value.is_exact() && (log - b).abs() <= 1e-12 * b.abs().max(1.0))
            }
        };
        if replace {
            best = Some((log, value));
        }
    }
    Ok(best.map_or(RegionValue::Exact(LimitScalar::zero()), |(_, v)| v))
}

fn max_times_product(x: &BoxMatrix, y: &BoxMatrix) -> BoxMatrix {
    let n = x.rows();
    let entries = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            (0..n)
                .map(|l| x.get(i, l) * y.get(l, j))
                .fold(LimitScalar::zero(), LimitScalar::max)
        })
        .collect();
    BoxMatrix::new(n, n, entries).expect("square")
}

/// Perron pair of `Φ_p(A)` mapped back through `φ_p⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronResult {
    /// `ρ_A^{(p)} = ρ(Φ_p(A))^{1/(2p+1)}`.
    pub rho: SignedLog,
    /// Positive eigenvector of `Φ_p(A)`, sup-norm 1, in log form.
    pub vector: Vec<SignedLog>,
    /// Final width of the Collatz-Wielandt bracket on `ln ρ_A^{(p)}`.
    pub gap: f64,
    pub iterations: usize,
}

/// Power iteration on `Φ_p(A)` in the log domain.
///
/// The iteration matrix is squared at every step, so `k` iterations apply
/// `Φ_p(A)^{2^k}` to the all-ones vector. It stops when the Collatz-Wielandt
/// bracket `[min_i (Φu)_i/u_i, max_i (Φu)_i/u_i]`, which always contains the
/// Perron root, is narrower than `tol` in relative terms on `ρ_A^{(p)}`.
/// Nearly periodic matrices leave a rounding floor in the log-domain bracket;
/// once the gap stops shrinking below [`PERRON_NOISE_FLOOR`] the best bracket
/// is returned with its gap, even if that is above `tol`.
pub fn perron_p(a: &BoxMatrix, p: PIndex, tol: f64, max_iter: usize) -> Result<PerronResult> {
    if !a.is_square() {
        return Err(BoxError::domain("the Perron root needs a square matrix"));
    }
    if let Some(k) = a.entries().iter().position(|x| !x.is_positive()) {
        return Err(BoxError::domain(format!(
            "the Perron iteration needs strictly positive entries; entry ({}, {}) is not",
            k / a.cols() + 1,
            k % a.cols() + 1
        )));
    }
    let n = a.rows();
    let q = p.exponent_f64();
    let base: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| q * a.get(i, j).ln_abs()).collect())
        .collect();
    let apply = |m: &[Vec<f64>], u: &[f64]| -> Vec<f64> {
        m.iter()
            .map(|row| {
                let mut terms: Vec<f64> = row.iter().zip(u).map(|(x, y)| x + y).collect();
                log_sum_exp(&mut terms)
            })
            .collect()
    };
    let normalize = |u: &mut [f64]| {
        let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        u.iter_mut().for_each(|x| *x -= top);
    };
    let bracket = |u: &[f64]| -> (f64, f64) {
        let w = apply(&base, u);
        let ratios = w.iter().zip(u).map(|(x, y)| x - y);
        ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
    };

    let finish = |u: &[f64], lo: f64, hi: f64, iterations: usize| {
        let mut vector_log = u.to_vec();
        normalize(&mut vector_log);
        PerronResult {
            rho: SignedLog::from_parts(1, 0.5 * (lo + hi) / q),
            vector: vector_log.iter().map(|&l| SignedLog::from_parts(1, l)).collect(),
            gap: (hi - lo) / q,
            iterations,
        }
    };

    // Iterating on Φ + sI with s = (max cycle mean)^q, which is within a factor
    // n of the Perron root, separates it from eigenvalues of equal modulus.
    // The bracket still uses Φ itself.
    let shift = q * max_cycle_mean(a)?.to_f64().ln();
    let mut power = base.clone();
    for (i, row) in power.iter_mut().enumerate() {
        row[i] = log_sum_exp(&mut [row[i], shift]);
    }
    let mut u = vec![0.0; n];
    let mut best: Option<(f64, f64, Vec<f64>, usize)> = None;
    let mut stalled = 0;
    let mut gap = f64::INFINITY;
    for iteration in 0..=max_iter {
        let (lo, hi) = bracket(&u);
        gap = (hi - lo) / q;
        if gap < tol {
            return Ok(finish(&u, lo, hi, iteration));
        }
        match &best {
            Some((blo, bhi, _, _)) if gap >= 0.5 * (bhi - blo) / q => stalled += 1,
            _ => stalled = 0,
        }
        if best.as_ref().is_none_or(|(blo, bhi, _, _)| hi - lo < bhi - blo) {
            best = Some((lo, hi, u.clone(), iteration));
        }
        if stalled >= PERRON_STALL {
            if let Some((lo, hi, u, at)) = &best {
                if (hi - lo) / q <= PERRON_NOISE_FLOOR {
                    return Ok(finish(u, *lo, *hi, *at));
                }
            }
        }
        u = apply(&power, &vec![0.0; n]);
        normalize(&mut u);
        power = log_matmul(&power, &power);
        let top = power
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        power.iter_mut().flatten().for_each(|x| *x -= top);
    }
    Err(BoxError::Convergence {
        iterations: max_iter,
        gap,
    })
}

/// Largest bracket gap accepted when the Perron iteration stagnates.
pub const PERRON_NOISE_FLOOR: f64 = 1e-9;
const PERRON_STALL: usize = 6;

fn log_matmul(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut terms: Vec<f64> = (0..n).map(|k| x[i][k] + y[k][j]).collect();
                    log_sum_exp(&mut terms)
                })
                .collect()
        })
        .collect()
}

/// Sign of `P^{(p)}(λ)`, computed exactly.
pub fn charpoly_sign_p(m: &MonomialList, lambda: &LimitScalar, p: PIndex) -> i8 {
    IntegerTerms::new(&m.reduced()).sign_at(lambda, p)
}

/// Monomials over a common coefficient denominator, so the sign of a
/// φ_p-sum at a rational point needs only integer arithmetic.
struct IntegerTerms {
    terms: Vec<(BigInt, u32)>,
    top_degree: u32,
}

impl IntegerTerms {
    fn new(reduced: &[Monomial]) -> Self {
        let lcm = reduced
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.coeff.denom()));
        let terms = reduced
            .iter()
            .map(|x| (x.coeff.numer() * (&lcm / x.coeff.denom()), x.degree))
            .collect();
        let top_degree = reduced.iter().map(|x| x.degree).max().unwrap_or(0);
        IntegerTerms { terms, top_degree }
    }

    fn sign_at(&self, lambda: &LimitScalar, p: PIndex) -> i8 {
        let q = p.exponent();
        let (num, den) = (lambda.numer(), lambda.denom());
        let total: BigInt = self
            .terms
            .iter()
            .map(|(c, d)| (c * num.pow(*d) * den.pow(self.top_degree - d)).pow(q))
            .sum();
        match total.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}

/// Roots of `P^{(p)}` in `[lo, hi]`: one per sign change on a uniform grid,
/// refined by bisection with exact sign evaluation.
pub fn finite_p_roots(m: &MonomialList, p: PIndex, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let terms = IntegerTerms::new(&m.reduced());
    let sign = |x: f64| LimitScalar::from_f64_exact(x).map_or(0, |l| terms.sign_at(&l, p));
    let samples = samples.max(2);
    let grid: Vec<f64> = (0..=samples)
        .map(|k| lo + (hi - lo) * k as f64 / samples as f64)
        .collect();
    let signs: Vec<i8> = grid.iter().map(|&x| sign(x)).collect();
    let mut roots = Vec::new();
    for k in 0..samples {
        if signs[k] == 0 {
            roots.push(grid[k]);
            continue;
        }
        if signs[k + 1] == 0 || signs[k + 1] == signs[k] {
            continue;
        }
        let (mut a, mut b) = (grid[k], grid[k + 1]);
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            match sign(mid) {
                0 => {
                    (a, b) = (mid, mid);
                    break;
                }
                s if s == signs[k] => a = mid,
                _ => b = mid,
            }
        }
        roots.push(0.5 * (a + b));
    }
    if signs[samples] == 0 {
        roots.push(grid[samples]);
    }
    roots
}

/// The root of `P^{(p)}` within `window` of `target` closest to it.
pub fn finite_p_root_near(m: &MonomialList, p: PIndex, target: f64, window: f64) -> Option<f64> {
    finite_p_roots(m, p, target - window, target + window, 64)
        .into_iter()
        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
}

impl PartialOrd for RegionValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (RegionValue::Exact(x), RegionValue::Exact(y)) => Some(x.cmp(y)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}
