//! Acceptance suite: one pass/fail line per criterion.

use std::process::ExitCode;

use boxalg::algebra::{boxplus, nary_boxplus, smile, smile2, Aggregation, Smile};
use boxalg::eigen::{boxtimes_eig_check, char_monomials, charpoly_eval, eigen_region, RegionOptions};
use boxalg::geom::{hyperplane_contains, hyperplane_through};
use boxalg::linalg::{det_inf, wedge_eval};
use boxalg::oracle::{sweep, Quantity, SweepOptions};
use boxalg::signed_log::phi_p_sum_scalars;
use boxalg::solve::{
    cramer_limit_solve, maxsys_existence_permutation, maxsys_solve, twosided_solve,
    verify_limit_system, LimitSystem, TwoSidedSystem,
};
use boxalg::sym::{balanced, embed_matrix, s_det, SPair};
use boxalg::{BoxMatrix, BoxVector, LimitScalar, PIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn s(v: i64) -> LimitScalar {
    LimitScalar::from_int(v)
}

fn q(n: i64, d: i64) -> LimitScalar {
    LimitScalar::ratio(n, d)
}

fn m(rows: &[&[i64]]) -> BoxMatrix {
    BoxMatrix::from_ints(rows)
}

fn v(xs: &[i64]) -> BoxVector {
    BoxVector::from_ints(xs)
}

fn vq(xs: &[(i64, i64)]) -> BoxVector {
    BoxVector::new(xs.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let xs: Vec<LimitScalar> = [-3, -2, 3, 3, 1, -3].iter().map(|&x| s(x)).collect();
    let got = nary_boxplus(&xs);
    ensure(got == s(-2), format!("boxplus = {got}"))?;
    Ok(format!("F = {got}"))
}

fn criterion_2() -> Outcome {
    let sys = LimitSystem::new(m(&[&[-1, 1], &[1, 1]]), v(&[2, 3])).map_err(fail)?;
    let r = cramer_limit_solve(&sys).map_err(fail)?;
    ensure(r.det == s(-1), format!("det = {}", r.det))?;
    let x = r.solution.clone().ok_or("no solution")?;
    ensure(x == v(&[3, 3]), format!("x = {x}"))?;
    let check = verify_limit_system(&sys, &x).map_err(fail)?;
    ensure(check.lower() == vec![s(-3), s(3)], format!("lower = {:?}", check.lower()))?;
    ensure(check.upper() == vec![s(3), s(3)], format!("upper = {:?}", check.upper()))?;
    ensure(check.satisfied(), "not satisfied")?;
    Ok(format!("det = -1, x = {x}"))
}

fn criterion_3() -> Outcome {
    let a = m(&[&[3, -1, 3], &[2, -4, 1], &[-4, 5, 3]]);
    let b = v(&[6, 8, 4]);
    let sys = LimitSystem::new(a, b).map_err(fail)?;
    let r = cramer_limit_solve(&sys).map_err(fail)?;
    ensure(r.det == s(-48), format!("det = {}", r.det))?;
    ensure(r.minors == vec![s(120), s(96), s(-120)], format!("minors = {:?}", r.minors))?;
    let x = r.solution.clone().ok_or("no solution")?;
    ensure(x == vq(&[(-5, 2), (-2, 1), (5, 2)]), format!("x = {x}"))?;
    let check = verify_limit_system(&sys, &x).map_err(fail)?;
    ensure(check.lower() == vec![q(-15, 2), s(8), s(-10)], format!("lower = {:?}", check.lower()))?;
    ensure(check.upper() == vec![q(15, 2), s(8), s(10)], format!("upper = {:?}", check.upper()))?;
    ensure(check.satisfied(), "not satisfied")?;
    Ok(format!("det = -48, x = {x}"))
}

fn criterion_4() -> Outcome {
    let a = m(&[&[2, 3], &[4, 1]]);
    let b = v(&[1, 1]);
    let r = cramer_limit_solve(&LimitSystem::new(a.clone(), b.clone()).map_err(fail)?).map_err(fail)?;
    ensure(r.det == s(-12), format!("det = {}", r.det))?;
    ensure(r.minors == vec![s(-3), s(-4)], format!("minors = {:?}", r.minors))?;
    let x2 = vq(&[(1, 4), (1, 3)]);
    ensure(r.solution.as_ref() == Some(&x2), "2x2 Cramer solution")?;
    ensure(maxsys_solve(&a, &b).map_err(fail)? == Some(x2.clone()), "2x2 max solution")?;

    let a3 = m(&[&[1, 3, 4], &[2, 5, 1], &[4, 2, 1]]);
    let b3 = v(&[1, 1, 1]);
    let r3 = cramer_limit_solve(&LimitSystem::new(a3.clone(), b3.clone()).map_err(fail)?).map_err(fail)?;
    ensure(r3.det == s(-80), format!("det = {}", r3.det))?;
    ensure(r3.minors == vec![s(-20), s(-16), s(-20)], format!("minors = {:?}", r3.minors))?;
    let x3 = vq(&[(1, 4), (1, 5), (1, 4)]);
    ensure(r3.solution.as_ref() == Some(&x3), "3x3 Cramer solution")?;
    ensure(maxsys_solve(&a3, &b3).map_err(fail)? == Some(x3.clone()), "3x3 max solution")?;
    Ok(format!("x = {x2}, {x3}"))
}

fn criterion_5() -> Outcome {
    let sys = TwoSidedSystem::new(
        m(&[&[2, 1], &[1, 3]]),
        m(&[&[1, 1], &[2, 2]]),
        v(&[4, 3]),
        v(&[3, 2]),
    )
    .map_err(fail)?;
    let r = twosided_solve(&sys).map_err(fail)?;
    ensure(r.d_matrix == m(&[&[2, 0], &[-2, 3]]), format!("A - C = {}", r.d_matrix))?;
    ensure(r.reduced.det == s(6), format!("det = {}", r.reduced.det))?;
    let x = r.solution().cloned().ok_or("no solution")?;
    ensure(x == vq(&[(2, 1), (4, 3)]), format!("x = {x}"))?;
    ensure(r.rows.len() == 2 && r.satisfied(), "original rows not satisfied")?;
    Ok(format!("det = 6, x = {x}"))
}

fn criterion_6() -> Outcome {
    let pts = vec![v(&[1, 0, -3]), v(&[2, -1, 1]), v(&[4, 1, 2])];
    let h = hyperplane_through(&pts).map_err(fail)?;
    ensure(h.coeffs() == &v(&[-3, 12, 4]), format!("coeffs = {}", h.coeffs()))?;
    ensure(h.rhs() == &s(-12), format!("rhs = {}", h.rhs()))?;
    for p in &pts {
        ensure(hyperplane_contains(&h, p).map_err(fail)?, format!("{p} not a member"))?;
    }
    ensure(!hyperplane_contains(&h, &v(&[0, 0, 0])).map_err(fail)?, "origin is a member")?;
    Ok("coeffs = (-3, 12, 4), rhs = -12".into())
}

fn criterion_7() -> Outcome {
    let opts = RegionOptions::default();
    let a = m(&[&[2, 1], &[1, 2]]);
    let mono = char_monomials(&a).map_err(fail)?;
    let lower = charpoly_eval(&mono, &s(2), Aggregation::Lower).exact().unwrap();
    let upper = charpoly_eval(&mono, &s(2), Aggregation::Upper).exact().unwrap();
    ensure((lower.clone(), upper.clone()) == (s(-4), s(4)), format!("P(2) = ({lower}, {upper})"))?;
    ensure(eigen_region(&a, &opts).map_err(fail)?.contains_exact(&s(2)), "2 not in region")?;
    let perron = sweep(&Quantity::Perron(a), &SweepOptions::default()).map_err(fail)?;
    ensure(perron.converged, format!("Perron gap {}", perron.gap))?;
    ensure(perron.limit[0].to_f64() == 2.0, "Perron limit")?;

    let a3 = m(&[&[1, 2, 1], &[2, 2, 9], &[1, 1, 3]]);
    let mono3 = char_monomials(&a3).map_err(fail)?;
    let lower = charpoly_eval(&mono3, &s(3), Aggregation::Lower).exact().unwrap();
    let upper = charpoly_eval(&mono3, &s(3), Aggregation::Upper).exact().unwrap();
    ensure((lower.clone(), upper.clone()) == (s(-27), s(27)), format!("P(3) = ({lower}, {upper})"))?;
    ensure(boxtimes_eig_check(&a3, &s(3), &v(&[2, 3, 1])).map_err(fail)?, "(3, (2,3,1)) check")?;

    let ones = m(&[&[1, 1], &[1, 1]]);
    let region = eigen_region(&ones, &opts).map_err(fail)?;
    ensure(region.contains_exact(&s(0)) && region.contains_exact(&s(1)), "region misses 0 or 1")?;
    ensure(!boxtimes_eig_check(&ones, &s(0), &v(&[1, 1])).map_err(fail)?, "0 passes the check")?;
    Ok(format!("Perron gap {:.1e} at p = 20", perron.gap))
}

fn criterion_8() -> Outcome {
    let a = m(&[&[3, 2, 3], &[1, 3, 2], &[3, 1, 3]]);
    let d = s_det(&embed_matrix(&a)).map_err(fail)?;
    let pair = SPair::from_ints(27, 27).unwrap();
    ensure(d == pair, format!("s_det = {d}"))?;
    ensure(balanced(&d, &SPair::zero()), "not balanced")?;
    let det = det_inf(&a).map_err(fail)?;
    ensure(det == s(12), format!("det_inf = {det}"))?;
    Ok(format!("s_det = {d}, det_inf = {det}"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> LimitScalar {
    let den = rng.gen_range(1..=4);
    q(rng.gen_range(-9 * den..=9 * den), den)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> BoxMatrix {
    BoxMatrix::new(n, n, (0..n * n).map(|_| random_rational(rng)).collect()).unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> BoxVector {
    BoxVector::new((0..n).map(|_| random_rational(rng)).collect()).unwrap()
}

fn criterion_9a(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let opts = SweepOptions {
        p_max: 24,
        tol: 1e-5,
        ..SweepOptions::default()
    };
    let (mut sweeps, mut flagged) = (0, 0);
    let mut matrices = 0;
    while matrices < 50 {
        let n = rng.gen_range(1..=4);
        let a = random_matrix(rng, n);
        if det_inf(&a).map_err(fail)?.is_zero() {
            continue;
        }
        matrices += 1;
        let b = random_vector(rng, n);
        let points: Vec<BoxVector> = (0..n).map(|j| a.column(j)).collect();
        let lambda = random_rational(rng);
        for quantity in [
            Quantity::Det(a.clone()),
            Quantity::Cramer(a.clone(), b),
            Quantity::Hyperplane(points),
            Quantity::Charpoly(a.clone(), lambda),
        ] {
            let r = sweep(&quantity, &opts).map_err(|e| format!("{}: {e}", quantity.kind()))?;
            sweeps += 1;
            if let Some(bounds) = &r.bounds {
                for (p, (g, b)) in r.gaps.iter().zip(bounds).enumerate() {
                    ensure(*g <= b + 1e-9, format!("{} gap {g} above its bound {b} at p = {p}", r.quantity))?;
                }
            }
            if r.near_tie {
                flagged += 1;
            } else {
                ensure(r.converged, format!("{} on {a}: gap {} without a near tie", r.quantity, r.gap))?;
            }
        }
    }
    Ok(format!("{sweeps} sweeps, {flagged} flagged near ties"))
}

fn criterion_9b(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..200 {
        let mut xs = Vec::new();
        for _ in 0..rng.gen_range(1..=6) {
            let x = random_rational(rng);
            let copies = rng.gen_range(1..=3);
            for _ in 0..copies {
                xs.push(x.clone());
                xs.push(-&x);
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            xs.push(LimitScalar::zero());
        }
        xs.shuffle(rng);
        ensure(nary_boxplus(&xs).is_zero(), "constructed multiset is not balanced")?;
        for p in 0..=32 {
            let v = phi_p_sum_scalars(&xs, PIndex::new(p));
            ensure(v.sign() == 0 && v.logmag() == f64::NEG_INFINITY, format!("p = {p}: {v:?}"))?;
        }
    }
    Ok("200 multisets, p = 0..32".into())
}

fn max_instance_agrees(a: &BoxMatrix, b: &BoxVector) -> Result<bool, String> {
    let perm = maxsys_existence_permutation(a, b).map_err(fail)?;
    match maxsys_solve(a, b) {
        Ok(sol) => Ok(sol.is_some() == perm.is_some()),
        // a column without positive entries has no finite candidate
        Err(_) => Ok(perm.is_none() && (0..a.cols()).any(|j| a.column(j).iter().all(LimitScalar::is_zero))),
    }
}

fn solvable_generic(a: &BoxMatrix, b: &BoxVector) -> bool {
    matches!(maxsys_solve(a, b), Ok(Some(_)))
}

fn generic_positive(rng: &mut ChaCha8Rng) -> LimitScalar {
    q(rng.gen_range(1..=100_000), rng.gen_range(1..=100_000))
}

fn criterion_9c(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut count = 0;
    let mut solvable = 0;
    for n in 1..=3usize {
        for pattern in 0u32..(1 << (n * n)) {
            let entries = (0..n * n)
                .map(|k| if pattern >> k & 1 == 1 { generic_positive(rng) } else { LimitScalar::zero() })
                .collect();
            let a = BoxMatrix::new(n, n, entries).unwrap();
            let b = BoxVector::new((0..n).map(|_| generic_positive(rng)).collect()).unwrap();
            ensure(max_instance_agrees(&a, &b)?, format!("disagreement on {a} with b = {b}"))?;
            count += 1;
            solvable += usize::from(solvable_generic(&a, &b));
        }
    }
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let a = BoxMatrix::new(
            n,
            n,
            (0..n * n)
                .map(|_| if rng.gen_bool(0.6) { generic_positive(rng) } else { LimitScalar::zero() })
                .collect(),
        )
        .unwrap();
        let b = BoxVector::new((0..n).map(|_| generic_positive(rng)).collect()).unwrap();
        ensure(max_instance_agrees(&a, &b)?, format!("disagreement on {a} with b = {b}"))?;
        count += 1;
        solvable += usize::from(solvable_generic(&a, &b));
    }
    Ok(format!("{count} instances, {solvable} solvable"))
}

fn criterion_9d(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..1000 {
        let len = rng.gen_range(1..=8);
        // small integers make magnitude ties frequent
        let xs: Vec<LimitScalar> = (0..len).map(|_| s(rng.gen_range(-4..=4))).collect();
        let lo = smile(&xs, Smile::Lower);
        let mid = nary_boxplus(&xs);
        let hi = smile(&xs, Smile::Upper);
        ensure(lo <= mid && mid <= hi, format!("sandwich fails on {xs:?}"))?;
        let (u, w) = (&xs[0], &xs[len - 1]);
        let half = (smile2(u, w, Smile::Lower) + smile2(u, w, Smile::Upper)) / s(2);
        ensure(boxplus(u, w) == half, format!("decomposition fails on ({u}, {w})"))?;
    }
    Ok("1000 vectors".into())
}

fn criterion_9e(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let a = random_matrix(rng, n);
        let det = det_inf(&a).map_err(fail)?;
        let j = rng.gen_range(0..n);
        let alpha = random_rational(rng);
        let scaled = a.replace_column(j, &a.column(j).scale(&alpha)).map_err(fail)?;
        ensure(det_inf(&scaled).map_err(fail)? == &alpha * &det, format!("scaling fails on {a}"))?;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let permuted = a.permute_columns(&perm).map_err(fail)?;
        let sign = if permutation_is_even(&perm) { s(1) } else { s(-1) };
        ensure(det_inf(&permuted).map_err(fail)? == &sign * &det, format!("permutation sign fails on {a}"))?;
        let cols: Vec<BoxVector> = (0..n).map(|k| a.column(k)).collect();
        ensure(wedge_eval(&cols).map_err(fail)? == det, "wedge differs from det")?;
    }
    Ok("100 matrices".into())
}

fn permutation_is_even(perm: &[usize]) -> bool {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    inversions % 2 == 0
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b0c5);
    let parts = [
        ("a", criterion_9a(&mut rng)),
        ("b", criterion_9b(&mut rng)),
        ("c", criterion_9c(&mut rng)),
        ("d", criterion_9d(&mut rng)),
        ("e", criterion_9e(&mut rng)),
    ];
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for (label, r) in parts {
        match r {
            Ok(d) => details.push(format!("({label}) {d}")),
            Err(e) => failures.push(format!("({label}) {e}")),
        }
    }
    if failures.is_empty() {
        Ok(details.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
