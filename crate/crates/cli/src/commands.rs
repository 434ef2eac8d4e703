//! One function per subcommand, each mapping a parsed problem to JSON.

use boxalg::algebra::Aggregation;
use boxalg::eigen::{
    boxtimes_eigenvector, char_monomials_with, charpoly_eval, eigen_region, in_region,
    max_cycle_mean, EigenRegion, RegionOptions, RegionValue,
};
use boxalg::geom::{hyperplane_contains, hyperplane_through_with, PHyperplane};
use boxalg::linalg::PermutationProducts;
use boxalg::oracle::{sweep, Quantity, SweepOptions, SweepReport};
use boxalg::perm::DEFAULT_CHARPOLY_CAP;
use boxalg::solve::{
    cramer_limit_solve_with, kaykobad_check, kaykobad_p_check, maxsys_candidate,
    maxsys_existence_permutation, maxsys_solve, twosided_solve_with, LimitSystem, RowCheck,
    TwoSidedSystem,
};
use boxalg::sym::{embed_matrix, s_det_with, v_identity_sides, SClass, SPair};
use boxalg::{BoxError, BoxMatrix, Enumeration, LimitScalar, PIndex, Smile};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::input::{InputError, Problem};
use crate::output::{self, region_value, scalar, scalars, signed_log, vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Det,
    Solve,
    Maxsolve,
    Twosided,
    Hyperplane,
    Charpoly,
    Eigen,
    Oracle,
    Sym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Lower,
    Upper,
    Exact,
}

impl Mode {
    fn parse(text: &str, path: &str) -> Result<Self, InputError> {
        Mode::from_str(text, true)
            .map_err(|_| InputError::new(path, format!("unknown mode {text:?}; use lower, upper or exact")))
    }
}

/// Numeric settings: command-line flags override a problem's `options`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Settings {
    pub p: Option<u32>,
    pub p_max: Option<u32>,
    pub tol: Option<f64>,
    pub mode: Option<Mode>,
    pub cap: Option<usize>,
}

impl Settings {
    fn merged_with(self, problem: &Problem) -> Result<Settings, InputError> {
        let Some(opts) = problem.options()? else {
            return Ok(self);
        };
        let mode = match opts.string("mode")? {
            Some(m) => Some(Mode::parse(m, &opts.at("mode"))?),
            None => None,
        };
        Ok(Settings {
            p: self.p.or(opts.u32("p")?),
            p_max: self.p_max.or(opts.u32("pmax")?),
            tol: self.tol.or(opts.f64("tol")?),
            mode: self.mode.or(mode),
            cap: self.cap,
        })
    }

    fn enumeration(&self) -> Enumeration {
        self.cap.map_or_else(Enumeration::default, Enumeration::with_cap)
    }

    fn charpoly_enumeration(&self) -> Enumeration {
        Enumeration::with_cap(self.cap.unwrap_or(DEFAULT_CHARPOLY_CAP))
    }

    fn sweep_options(&self) -> SweepOptions {
        let defaults = SweepOptions::default();
        SweepOptions {
            p_max: self.p_max.unwrap_or(defaults.p_max),
            tol: self.tol.unwrap_or(defaults.tol),
            cap: self.cap.unwrap_or(defaults.cap),
            ..defaults
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Input(InputError),
    Library(BoxError),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<BoxError> for Failure {
    fn from(e: BoxError) -> Self {
        Failure::Library(e)
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_CAPACITY: u8 = 4;

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Library(e) => match e.root() {
                BoxError::Capacity { .. } => EXIT_CAPACITY,
                BoxError::Degenerate(_) | BoxError::Convergence { .. } => EXIT_INFEASIBLE,
                _ => EXIT_INPUT,
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Failure::Input(e) => json!({
                "error": {"kind": "input", "position": e.path, "message": e.message}
            }),
            Failure::Library(e) => {
                let kind = match e.root() {
                    BoxError::Capacity { .. } => "capacity",
                    BoxError::Degenerate(_) => "degenerate",
                    BoxError::Convergence { .. } => "convergence",
                    BoxError::Dimension(_) => "dimension",
                    BoxError::Parse(_) => "parse",
                    _ => "domain",
                };
                json!({"error": {"kind": kind, "message": e.to_string()}})
            }
        }
    }
}

/// A finished command: the exit code and the exact JSON document.
pub struct Outcome {
    pub code: u8,
    pub body: Value,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { code: EXIT_OK, body }
    }

    fn feasible_if(feasible: bool, body: Value) -> Self {
        Outcome {
            code: if feasible { EXIT_OK } else { EXIT_INFEASIBLE },
            body,
        }
    }
}

pub fn run(command: Command, problem: &Problem, settings: Settings) -> Result<Outcome, Failure> {
    let settings = settings.merged_with(problem)?;
    match command {
        Command::Det => det(problem, &settings),
        Command::Solve => solve(problem, &settings),
        Command::Maxsolve => maxsolve(problem, &settings),
        Command::Twosided => twosided(problem, &settings),
        Command::Hyperplane => hyperplane(problem, &settings),
        Command::Charpoly => charpoly(problem, &settings),
        Command::Eigen => eigen(problem, &settings),
        Command::Oracle => oracle(problem, &settings),
        Command::Sym => sym(problem, &settings),
    }
}

fn det(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let a = problem.matrix("A")?;
    if !a.is_square() {
        return Err(InputError::new(problem.at("A"), "expected a square matrix").into());
    }
    let products = PermutationProducts::compute_with(&a, &settings.enumeration())?;
    let lower = products.smile(Smile::Lower);
    let upper = products.smile(Smile::Upper);
    let limit = products.limit();
    let selected = match settings.mode.unwrap_or(Mode::Exact) {
        Mode::Lower => &lower,
        Mode::Upper => &upper,
        Mode::Exact => &limit,
    };
    let mut body = json!({
        "det": scalar(selected),
        "det_inf": scalar(&limit),
        "det_lower": scalar(&lower),
        "det_upper": scalar(&upper),
        "det_classical": scalar(&products.classical()),
    });
    if let Some(p) = settings.p {
        body["det_p"] = json!({"p": p, "det": signed_log(products.phi_p(PIndex::new(p)))});
    }
    Ok(Outcome::ok(body))
}

fn rows_json(rows: &[RowCheck]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "lower": scalar(&r.lower),
                    "upper": scalar(&r.upper),
                    "satisfied": r.satisfied,
                })
            })
            .collect(),
    )
}

fn system(problem: &Problem) -> Result<LimitSystem, Failure> {
    let a = problem.matrix("A")?;
    let b = problem.vector("b")?;
    Ok(LimitSystem::new(a, b)?)
}

fn solve(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let sys = system(problem)?;
    let report = cramer_limit_solve_with(&sys, &settings.enumeration())?;
    let body = json!({
        "det_inf": scalar(&report.det),
        "minors": scalars(&report.minors),
        "x": report.solution.as_ref().map_or(Value::Null, vector),
        "rows": rows_json(&report.per_row),
        "satisfied": report.solution.is_some() && report.satisfied(),
        "regular": report.regular,
    });
    Ok(Outcome::feasible_if(report.solution.is_some(), body))
}

fn maxsolve(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let a = problem.matrix("A")?;
    let b = problem.vector("b")?;
    let candidate = maxsys_candidate(&a, &b)?;
    let x = maxsys_solve(&a, &b)?;
    let mut body = json!({
        "candidate": vector(&candidate),
        "x": x.as_ref().map_or(Value::Null, vector),
    });
    if a.is_square() {
        let perm = maxsys_existence_permutation(&a, &b)?;
        body["sigma"] = perm.as_ref().map_or(Value::Null, |p| json!(p.sigma));
        body["strict"] = perm.as_ref().map_or(Value::Null, |p| json!(p.strict));
        body["kaykobad"] = match kaykobad_check(&a, &b) {
            Ok(flag) => json!(flag),
            Err(BoxError::Domain(_)) => Value::Null,
            Err(e) => return Err(e.into()),
        };
        if let (Some(p), Some(perm)) = (settings.p, &perm) {
            body["kaykobad_p"] = json!({"p": p, "holds": kaykobad_p_check(&a, &b, &perm.sigma, PIndex::new(p))?});
        }
        let report = cramer_limit_solve_with(&LimitSystem::new(a, b)?, &settings.enumeration())?;
        body["det_inf"] = scalar(&report.det);
        body["minors"] = scalars(&report.minors);
    }
    Ok(Outcome::feasible_if(x.is_some(), body))
}

fn twosided(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let sys = TwoSidedSystem::new(
        problem.matrix("A")?,
        problem.matrix("C")?,
        problem.vector("b")?,
        problem.vector("d")?,
    )?;
    let report = twosided_solve_with(&sys, &settings.enumeration())?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "a_lower": scalar(&r.a_lower),
                "c_lower": scalar(&r.c_lower),
                "a_upper": scalar(&r.a_upper),
                "c_upper": scalar(&r.c_upper),
                "satisfied": r.satisfied(),
            })
        })
        .collect();
    let solution = report.solution();
    let body = json!({
        "d_matrix": output::matrix(&report.d_matrix),
        "r_vector": vector(&report.r_vector),
        "det_inf": scalar(&report.reduced.det),
        "minors": scalars(&report.reduced.minors),
        "x": solution.map_or(Value::Null, vector),
        "rows": rows,
        "satisfied": solution.is_some() && report.satisfied(),
        "regular": solution.is_some() && report.regular(),
    });
    Ok(Outcome::feasible_if(solution.is_some(), body))
}

fn hyperplane(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let points = problem.vectors("points")?;
    let queries = problem.optional_vectors("queries")?;
    let h = match hyperplane_through_with(&points, &settings.enumeration()) {
        Ok(h) => h,
        Err(e @ BoxError::Degenerate(_)) => {
            return Ok(Outcome::feasible_if(false, json!({"degenerate": e.to_string()})));
        }
        Err(e) => return Err(e.into()),
    };
    let finite = settings.p.map(|p| PHyperplane::new(&points, PIndex::new(p))).transpose()?;
    let describe = |x: &boxalg::BoxVector| -> Result<Value, Failure> {
        let (lower, upper) = h.forms(x)?;
        let mut entry = json!({
            "point": vector(x),
            "lower": scalar(&lower),
            "upper": scalar(&upper),
            "member": hyperplane_contains(&h, x)?,
        });
        if let Some(ph) = &finite {
            entry["p_relative_residual"] = json!(ph.relative_residual(x)?);
        }
        Ok(entry)
    };
    let body = json!({
        "coeffs": vector(h.coeffs()),
        "rhs": scalar(h.rhs()),
        "points": points.iter().map(&describe).collect::<Result<Vec<_>, _>>()?,
        "queries": queries.iter().map(&describe).collect::<Result<Vec<_>, _>>()?,
    });
    Ok(Outcome::ok(body))
}

fn charpoly(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let a = problem.matrix("A")?;
    let m = char_monomials_with(&a, &settings.charpoly_enumeration())?;
    let monomials = |list: &[boxalg::eigen::Monomial]| -> Value {
        list.iter()
            .map(|x| json!({"coeff": scalar(&x.coeff), "degree": x.degree}))
            .collect()
    };
    let exact = |lambda: &LimitScalar, how: Aggregation| {
        charpoly_eval(&m, lambda, how).exact().map_or(Value::Null, |x| scalar(&x))
    };
    let evaluations: Vec<Value> = problem
        .scalars("lambda")?
        .iter()
        .map(|lambda| {
            let mut entry = json!({
                "lambda": scalar(lambda),
                "limit": exact(lambda, Aggregation::Limit),
                "lower": exact(lambda, Aggregation::Lower),
                "upper": exact(lambda, Aggregation::Upper),
                "in_region": in_region(&m, lambda),
            });
            if let Some(p) = settings.p {
                if let boxalg::algebra::Aggregated::Finite(v) =
                    charpoly_eval(&m, lambda, Aggregation::P(PIndex::new(p)))
                {
                    entry["p"] = json!({"p": p, "value": signed_log(v)});
                }
            }
            entry
        })
        .collect();
    let body = json!({
        "count": m.len(),
        "monomials": monomials(m.monomials()),
        "reduced": monomials(&m.reduced()),
        "evaluations": evaluations,
    });
    Ok(Outcome::ok(body))
}

fn region_json(region: &EigenRegion) -> Value {
    json!({
        "all_reals": region.all_reals,
        "points": region.points.iter().map(|p| json!({
            "value": region_value(&p.value),
            "exact": p.value.is_exact(),
            "boxtimes_eigenvalue": p.boxtimes_eigenvalue,
        })).collect::<Vec<_>>(),
        "intervals": region.intervals.iter().map(|i| json!({"low": i.low, "high": i.high})).collect::<Vec<_>>(),
    })
}

fn sweep_json(report: &SweepReport) -> Value {
    json!({
        "quantity": report.quantity,
        "ps": report.ps,
        "values": report.values.iter().map(|v| v.iter().map(|x| x.to_f64()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "limit": report.limit.iter().map(region_value).collect::<Vec<_>>(),
        "gaps": report.gaps,
        "gap": report.gap,
        "tol": report.tol,
        "converged": report.converged,
        "converged_at": report.converged_at,
        "bounds": report.bounds,
        "near_tie": report.near_tie,
    })
}

fn eigen(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let a = problem.matrix("A")?;
    let opts = RegionOptions {
        enumeration: settings.charpoly_enumeration(),
        ..RegionOptions::default()
    };
    let region = eigen_region(&a, &opts)?;
    let nonnegative = a.entries().iter().all(|x| !x.is_negative());
    let mut body = json!({
        "region": region_json(&region),
        "max_cycle_mean": Value::Null,
        "eigenvector": Value::Null,
        "perron": Value::Null,
    });
    if nonnegative {
        let mean = max_cycle_mean(&a)?;
        if let RegionValue::Exact(lambda) = &mean {
            if let Some(v) = boxtimes_eigenvector(&a, lambda) {
                body["eigenvector"] = vector(&v);
            }
        }
        body["max_cycle_mean"] = region_value(&mean);
    }
    if a.entries().iter().all(LimitScalar::is_positive) {
        body["perron"] = sweep_json(&sweep(&Quantity::Perron(a), &settings.sweep_options())?);
    }
    Ok(Outcome::ok(body))
}

fn oracle(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let kind = problem
        .string("quantity")?
        .ok_or_else(|| InputError::new(problem.at("quantity"), "missing field"))?;
    let quantity = match kind {
        "phi_sum" => Quantity::PhiSum(problem.scalars("values")?),
        "det" => Quantity::Det(problem.matrix("A")?),
        "cramer" => Quantity::Cramer(problem.matrix("A")?, problem.vector("b")?),
        "hyperplane" => Quantity::Hyperplane(problem.vectors("points")?),
        "charpoly" => Quantity::Charpoly(problem.matrix("A")?, problem.scalar("lambda")?),
        "perron" => Quantity::Perron(problem.matrix("A")?),
        other => {
            return Err(InputError::new(
                "quantity",
                format!("unknown quantity {other:?}; use phi_sum, det, cramer, hyperplane, charpoly or perron"),
            )
            .into())
        }
    };
    if matches!(&quantity, Quantity::PhiSum(v) if v.is_empty()) {
        return Err(InputError::new(problem.at("values"), "expected a nonempty list").into());
    }
    Ok(Outcome::ok(sweep_json(&sweep(&quantity, &settings.sweep_options())?)))
}

fn pair_json(x: &SPair) -> Value {
    let class = match x.class() {
        SClass::Positive => "positive",
        SClass::Negative => "negative",
        SClass::Balanced => "balanced",
    };
    json!({"plus": scalar(x.plus()), "minus": scalar(x.minus()), "class": class})
}

fn pair(value: &Value, path: &str) -> Result<SPair, InputError> {
    match value.as_array().map(Vec::as_slice) {
        Some([plus, minus]) => {
            let plus = crate::input::scalar(plus, &format!("{path}[0]"))?;
            let minus = crate::input::scalar(minus, &format!("{path}[1]"))?;
            SPair::new(plus, minus).map_err(|e| InputError::new(path, e.to_string()))
        }
        _ => Err(InputError::new(path, "expected a pair [plus, minus]")),
    }
}

fn pair_matrix(value: &Value, path: &str) -> Result<Vec<Vec<SPair>>, InputError> {
    let rows = value
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| InputError::new(path, "expected a nonempty array of rows"))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row_path = format!("{path}[{i}]");
            let entries = row
                .as_array()
                .ok_or_else(|| InputError::new(&row_path, "expected an array"))?;
            if entries.len() != rows.len() {
                return Err(InputError::new(&row_path, "expected a square matrix"));
            }
            entries
                .iter()
                .enumerate()
                .map(|(j, v)| pair(v, &format!("{row_path}[{j}]")))
                .collect()
        })
        .collect()
}

fn sym(problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let mut body = json!({});
    let matrix = match (problem.get("A"), problem.get("S")) {
        (Some(_), Some(_)) => return Err(InputError::new(problem.path(), "give either A or S, not both").into()),
        (Some(_), None) => {
            let a: BoxMatrix = problem.matrix("A")?;
            if !a.is_square() {
                return Err(InputError::new(problem.at("A"), "expected a square matrix").into());
            }
            body["det_inf"] = scalar(&PermutationProducts::compute_with(&a, &settings.enumeration())?.limit());
            Some(embed_matrix(&a))
        }
        (None, Some(s)) => Some(pair_matrix(s, &problem.at("S"))?),
        (None, None) => None,
    };
    if let Some(m) = matrix {
        let det = s_det_with(&m, &settings.enumeration())?;
        body["balanced"] = json!(det.class() == SClass::Balanced);
        body["s_det"] = pair_json(&det);
    }
    if let Some(value) = problem.get("pairs") {
        let items = value
            .as_array()
            .ok_or_else(|| InputError::new(problem.at("pairs"), "expected an array of pairs"))?;
        let pairs = items
            .iter()
            .enumerate()
            .map(|(i, v)| pair(v, &format!("{}[{i}]", problem.at("pairs"))))
            .collect::<Result<Vec<_>, _>>()?;
        let (lhs, rhs) = v_identity_sides(&pairs);
        body["v_identity"] = json!({"lhs": scalar(&lhs), "rhs": scalar(&rhs), "holds": lhs == rhs});
    }
    if body.as_object().is_some_and(|m| m.is_empty()) {
        return Err(InputError::new(problem.path(), "expected A, S or pairs").into());
    }
    Ok(Outcome::ok(body))
}
