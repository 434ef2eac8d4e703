use boxalg::algebra::{nary_boxplus, Aggregation};
use boxalg::eigen::{
    boxtimes_eig_check, boxtimes_eigenvector, char_monomials, charpoly_eval, eigen_region,
    finite_p_root_near, max_cycle_mean, monomial_count, perron_p, RegionOptions, RegionValue,
};
use boxalg::{det_inf, BoxMatrix, LimitScalar, PIndex};
use proptest::prelude::*;

fn square(entries: impl Strategy<Value = i64> + Clone, max_n: usize) -> impl Strategy<Value = BoxMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(entries.clone().prop_map(LimitScalar::from_int), n * n)
            .prop_map(move |e| BoxMatrix::new(n, n, e).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiset_size(a in square(-5i64..=5, 5)) {
        prop_assert_eq!(char_monomials(&a).unwrap().len(), monomial_count(a.rows()));
    }

    #[test]
    fn constant_terms_aggregate_to_the_determinant(a in square(-5i64..=5, 4)) {
        let m = char_monomials(&a).unwrap();
        prop_assert_eq!(nary_boxplus(&m.constant_terms()), det_inf(&a).unwrap());
    }

    #[test]
    fn evaluation_sandwich(a in square(-4i64..=4, 4), n in -6i64..=6, d in 1i64..=3) {
        let m = char_monomials(&a).unwrap();
        let lambda = LimitScalar::ratio(n, d);
        let lo = charpoly_eval(&m, &lambda, Aggregation::Lower).exact().unwrap();
        let mid = charpoly_eval(&m, &lambda, Aggregation::Limit).exact().unwrap();
        let hi = charpoly_eval(&m, &lambda, Aggregation::Upper).exact().unwrap();
        prop_assert!(lo <= mid && mid <= hi);
    }

    #[test]
    fn perron_limits_lie_in_the_region(a in square(1i64..=9, 3)) {
        let limit = max_cycle_mean(&a).unwrap();
        let region = eigen_region(&a, &RegionOptions::default()).unwrap();
        let inside = match &limit {
            RegionValue::Exact(x) => region.contains_exact(x),
            RegionValue::Approx(x) => region.contains_approx(*x, 1e-9),
        };
        prop_assert!(inside, "{:?} not in {:?}", limit, region);
        // the finite-p Perron roots approach it
        let rho = perron_p(&a, PIndex::new(12), 1e-12, 200).unwrap().rho.to_f64();
        let n = a.rows() as f64;
        prop_assert!(rho >= limit.to_f64() - 1e-9);
        prop_assert!(rho <= limit.to_f64() * n.powf(1.0 / 25.0) + 1e-9);
    }

    #[test]
    fn maximal_region_point_is_the_boxtimes_eigenvalue(a in square(1i64..=9, 3)) {
        let region = eigen_region(&a, &RegionOptions::default()).unwrap();
        let top = region.max_point().unwrap();
        let limit = max_cycle_mean(&a).unwrap();
        prop_assert!((top.value.to_f64() - limit.to_f64()).abs() <= 1e-9 * limit.to_f64());
        if let RegionValue::Exact(lambda) = &top.value {
            prop_assert_eq!(top.boxtimes_eigenvalue, Some(true));
            let v = boxtimes_eigenvector(&a, lambda).unwrap();
            prop_assert!(v.iter().all(LimitScalar::is_positive));
            prop_assert!(boxtimes_eig_check(&a, lambda, &v).unwrap());
        }
    }

    #[test]
    fn finite_p_roots_approach_region_points(a in square(1i64..=9, 2)) {
        let m = char_monomials(&a).unwrap();
        let region = eigen_region(&a, &RegionOptions::default()).unwrap();
        for point in region.points.iter().filter(|p| p.value.to_f64() > 0.0) {
            let target = point.value.to_f64();
            let dist: Vec<f64> = [4, 8, 12]
                .iter()
                .map(|&p| {
                    finite_p_root_near(&m, PIndex::new(p), target, target)
                        .map_or(f64::INFINITY, |r| (r - target).abs())
                })
                .collect();
            prop_assert!(dist[2].is_finite(), "no root near {} at p = 12", target);
            prop_assert!(dist[2] <= dist[0] + 1e-12, "{:?}", dist);
        }
    }
}
