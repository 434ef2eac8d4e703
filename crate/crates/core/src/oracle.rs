//! Finite-p sweeps: evaluates a quantity at `p = 0, 1, …, p_max` and measures
//! the distance to its limit.
//!
//! For multiset sums the report also carries a rigorous bound on the
//! relative gap. If the dominant magnitude `M` survives with net count `c`
//! and the rest weigh at most `N` copies of the next magnitude `m`, then
//! `φ_p⁻¹(Σ) / (±M)` lies in `[(|c| - N r^q)^{1/q}, (|c| + N r^q)^{1/q}]`
//! with `r = m / M` and `q = 2p + 1`. Inputs whose bound is still above the
//! tolerance at `p_max` are flagged as near ties: their slow convergence is
//! a property of the input, not a numerical failure.

use crate::algebra::{aggregate, magnitude_groups, Aggregation};
use crate::eigen::{char_monomials_with, max_cycle_mean, perron_p, RegionValue};
use crate::error::{BoxError, Result};
use crate::geom::{hyperplane_through_with, PHyperplane};
use crate::linalg::{BoxMatrix, BoxVector, PermutationProducts};
use crate::parallel::Execution;
use crate::perm::{Enumeration, DEFAULT_CHARPOLY_CAP};
use crate::scalar::{LimitScalar, PIndex};
use crate::signed_log::SignedLog;
use crate::solve::{cramer_limit_solve_with, LimitSystem};

/// Largest accepted `p_max`; keeps `q · ln|x|` well inside the f64 range.
pub const MAX_P: u32 = 64;

const PERRON_TOLERANCE: f64 = 1e-13;
const PERRON_MAX_ITER: usize = 200;

/// A quantity with a finite-p family and a limit.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    /// `φ_p⁻¹(Σ φ_p(x_i))` against `⊞ x_i`.
    PhiSum(Vec<LimitScalar>),
    /// `|A|_p` against `|A|_∞`.
    Det(BoxMatrix),
    /// The classical solution of `Φ_p(A) u = φ_p(b)` mapped through `φ_p⁻¹`,
    /// against the limit Cramer solution.
    Cramer(BoxMatrix, BoxVector),
    /// Residual of the finite-p hyperplane at each defining point, against 0.
    Hyperplane(Vec<BoxVector>),
    /// `P^{(p)}(λ)` against `P^∞(λ)`.
    Charpoly(BoxMatrix, LimitScalar),
    /// `ρ_A^{(p)}` against the largest geometric cycle mean.
    Perron(BoxMatrix),
}

impl Quantity {
    pub fn kind(&self) -> &'static str {
        match self {
            Quantity::PhiSum(_) => "phi_sum",
            Quantity::Det(_) => "det",
            Quantity::Cramer(..) => "cramer",
            Quantity::Hyperplane(_) => "hyperplane",
            Quantity::Charpoly(..) => "charpoly",
            Quantity::Perron(_) => "perron",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub p_max: u32,
    pub tol: f64,
    pub execution: Execution,
    pub cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            p_max: 20,
            tol: 1e-6,
            execution: Execution::default(),
            cap: DEFAULT_CHARPOLY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub quantity: &'static str,
    pub ps: Vec<u32>,
    /// Finite-p values, one vector per `p` (length 1 for scalar quantities).
    pub values: Vec<Vec<SignedLog>>,
    pub limit: Vec<RegionValue>,
    /// Sup-norm gap per `p`: relative where the limit is nonzero, absolute
    /// where it is zero.
    pub gaps: Vec<f64>,
    pub gap: f64,
    pub tol: f64,
    pub converged: bool,
    /// First `p` from which every later gap is below `tol`.
    pub converged_at: Option<u32>,
    /// Rigorous upper bound on each gap, when one is known.
    pub bounds: Option<Vec<f64>>,
    pub near_tie: bool,
}

impl SweepReport {
    pub fn gap_bound(&self) -> Option<f64> {
        self.bounds.as_ref().and_then(|b| b.last().copied())
    }
}

/// Bracket `[lo, hi]` on `value / limit` for a φ_p-sum.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    const EXACT: Bracket = Bracket { lo: 1.0, hi: 1.0 };

    fn of_multiset(groups: &[(LimitScalar, i64)], q: f64) -> Bracket {
        let mut live = groups.iter().filter(|(_, net)| *net != 0);
        let Some((top, c)) = live.next() else {
            return Bracket::EXACT;
        };
        let rest: Vec<&(LimitScalar, i64)> = live.collect();
        let Some((next, _)) = rest.first() else {
            let c = c.unsigned_abs() as f64;
            let r = c.powf(1.0 / q);
            return Bracket { lo: r, hi: r };
        };
        let weight: f64 = rest.iter().map(|(_, n)| n.unsigned_abs() as f64).sum();
        let t = (weight.ln() + q * (next.ln_abs() - top.ln_abs())).exp();
        let c = c.unsigned_abs() as f64;
        let lo = if c > t { (c - t).powf(1.0 / q) } else { f64::NEG_INFINITY };
        Bracket {
            lo,
            hi: (c + t).powf(1.0 / q),
        }
    }

    fn ratio(num: Bracket, den: Bracket) -> Bracket {
        if den.lo <= 0.0 || num.lo == f64::NEG_INFINITY {
            return Bracket {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
        }
        Bracket {
            lo: num.lo / den.hi,
            hi: num.hi / den.lo,
        }
    }

    fn relative_bound(self) -> f64 {
        (self.hi - 1.0).max(1.0 - self.lo)
    }
}

/// `|v - L| / |L|`, or `|v|` when `L = 0`, computed without leaving the log
/// domain.
fn component_gap(value: SignedLog, limit: &RegionValue) -> f64 {
    let l = limit.to_f64();
    if l == 0.0 {
        return value.to_f64().abs();
    }
    if value.is_zero() {
        return 1.0;
    }
    let ratio = (value.logmag() - l.abs().ln()).exp();
    if (value.sign() > 0) == (l > 0.0) {
        (ratio - 1.0).abs()
    } else {
        ratio + 1.0
    }
}

struct Prepared {
    limit: Vec<RegionValue>,
    eval: Box<dyn Fn(PIndex) -> Result<Evaluation> + Send + Sync>,
}

struct Evaluation {
    values: Vec<SignedLog>,
    gap: f64,
    bound: Option<f64>,
}

fn exact(values: Vec<LimitScalar>) -> Vec<RegionValue> {
    values.into_iter().map(RegionValue::Exact).collect()
}

fn scalar_family(values: Vec<LimitScalar>) -> Prepared {
    let limit = aggregate(&values, Aggregation::Limit)
        .exact()
        .expect("limit aggregation is exact");
    let groups = magnitude_groups(&values);
    let limit = vec![RegionValue::Exact(limit)];
    let target = limit.clone();
    Prepared {
        limit,
        eval: Box::new(move |p| {
            let v = aggregate(&values, Aggregation::P(p))
                .finite()
                .expect("finite aggregation");
            let bracket = Bracket::of_multiset(&groups, p.exponent_f64());
            Ok(Evaluation {
                values: vec![v],
                gap: component_gap(v, &target[0]),
                bound: Some(if target[0].to_f64() == 0.0 { 0.0 } else { bracket.relative_bound() }),
            })
        }),
    }
}

fn prepare(quantity: &Quantity, opts: &SweepOptions) -> Result<Prepared> {
    let config = Enumeration {
        cap: opts.cap,
        execution: Execution::Sequential,
    };
    match quantity {
        Quantity::PhiSum(xs) => Ok(scalar_family(xs.clone())),
        Quantity::Det(a) => {
            let products = PermutationProducts::compute_with(a, &config)?;
            Ok(scalar_family(products.products().to_vec()))
        }
        Quantity::Charpoly(a, lambda) => {
            let m = char_monomials_with(a, &config)?;
            Ok(scalar_family(m.values_at(lambda)))
        }
        Quantity::Cramer(a, b) => {
            let system = LimitSystem::new(a.clone(), b.clone())?;
            let report = cramer_limit_solve_with(&system, &config)?;
            let Some(solution) = report.solution else {
                return Err(BoxError::Degenerate("the limit system is singular".into()));
            };
            let det = PermutationProducts::compute_with(a, &config)?;
            let minors = (0..a.cols())
                .map(|i| PermutationProducts::compute_with(&a.replace_column(i, b)?, &config))
                .collect::<Result<Vec<_>>>()?;
            let det_groups = magnitude_groups(det.products());
            let minor_groups: Vec<_> = minors.iter().map(|m| magnitude_groups(m.products())).collect();
            let limit = exact(solution.into_inner());
            let target = limit.clone();
            Ok(Prepared {
                limit,
                eval: Box::new(move |p| {
                    let d = det.phi_p(p);
                    let den = Bracket::of_multiset(&det_groups, p.exponent_f64());
                    let mut values = Vec::with_capacity(minors.len());
                    let (mut gap, mut bound) = (0.0f64, 0.0f64);
                    for ((minor, groups), l) in minors.iter().zip(&minor_groups).zip(&target) {
                        let x = minor
                            .phi_p(p)
                            .checked_div(d)
                            .ok_or_else(|| BoxError::Degenerate("the finite-p determinant vanishes".into()))?;
                        gap = gap.max(component_gap(x, l));
                        if l.to_f64() != 0.0 {
                            let num = Bracket::of_multiset(groups, p.exponent_f64());
                            bound = bound.max(Bracket::ratio(num, den).relative_bound());
                        }
                        values.push(x);
                    }
                    Ok(Evaluation {
                        values,
                        gap,
                        bound: Some(bound),
                    })
                }),
            })
        }
        Quantity::Hyperplane(points) => {
            hyperplane_through_with(points, &config)?;
            let limit = vec![RegionValue::Exact(LimitScalar::zero()); points.len()];
            let points = points.clone();
            Ok(Prepared {
                limit,
                eval: Box::new(move |p| {
                    let hp = PHyperplane::new(&points, p)?;
                    let mut values = Vec::with_capacity(points.len());
                    let mut gap = 0.0f64;
                    for x in &points {
                        values.push(hp.residual(x)?);
                        gap = gap.max(hp.relative_residual(x)?);
                    }
                    Ok(Evaluation { values, gap, bound: None })
                }),
            })
        }
        Quantity::Perron(a) => {
            let limit = vec![max_cycle_mean(a)?];
            let target = limit.clone();
            let a = a.clone();
            Ok(Prepared {
                limit,
                eval: Box::new(move |p| {
                    let r = perron_p(&a, p, PERRON_TOLERANCE, PERRON_MAX_ITER)?;
                    Ok(Evaluation {
                        values: vec![r.rho],
                        gap: component_gap(r.rho, &target[0]),
                        bound: None,
                    })
                }),
            })
        }
    }
}

/// Evaluates `quantity` at every `p ≤ opts.p_max`.
pub fn sweep(quantity: &Quantity, opts: &SweepOptions) -> Result<SweepReport> {
    if opts.p_max > MAX_P {
        return Err(BoxError::domain(format!(
            "p_max = {} is above the supported maximum {MAX_P}",
            opts.p_max
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(BoxError::domain("the tolerance must be positive"));
    }
    let prepared = prepare(quantity, opts)?;
    let ps: Vec<u32> = (0..=opts.p_max).collect();
    let evals = opts.execution.try_map(ps.len(), |k| {
        (prepared.eval)(PIndex::new(ps[k])).map_err(|e| BoxError::AtP {
            p: ps[k],
            source: Box::new(e),
        })
    })?;

    let gaps: Vec<f64> = evals.iter().map(|e| e.gap).collect();
    let bounds: Option<Vec<f64>> = evals.iter().map(|e| e.bound).collect();
    let gap = *gaps.last().expect("p = 0 is always evaluated");
    let converged = gap < opts.tol;
    let converged_at = converged.then(|| {
        let k = gaps.iter().rposition(|g| !(*g < opts.tol)).map_or(0, |k| k + 1);
        ps[k]
    });
    let near_tie = bounds
        .as_ref()
        .and_then(|b| b.last())
        .is_some_and(|b| !(*b < opts.tol));
    Ok(SweepReport {
        quantity: quantity.kind(),
        ps,
        values: evals.into_iter().map(|e| e.values).collect(),
        limit: prepared.limit,
        gaps,
        gap,
        tol: opts.tol,
        converged,
        converged_at,
        bounds,
        near_tie,
    })
}
