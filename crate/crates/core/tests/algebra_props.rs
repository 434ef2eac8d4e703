use boxalg::algebra::{boxplus, inner_limit, nary_boxplus, smile, smile2, Smile};
use boxalg::signed_log::{phi_p_sum_scalars, SignedLog};
use boxalg::{LimitScalar, PIndex};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = LimitScalar> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| LimitScalar::ratio(n, d))
}

fn small_int() -> impl Strategy<Value = LimitScalar> {
    (-4i64..=4).prop_map(LimitScalar::from_int)
}

fn values() -> impl Strategy<Value = Vec<LimitScalar>> {
    prop_oneof![
        prop::collection::vec(small_int(), 0..10),
        prop::collection::vec(rational(), 0..10),
    ]
}

fn balanced_multiset() -> impl Strategy<Value = Vec<LimitScalar>> {
    prop::collection::vec((rational(), 1usize..4), 0..6)
        .prop_map(|pairs| {
            pairs
                .into_iter()
                .flat_map(|(x, k)| {
                    let neg = -&x;
                    std::iter::repeat_n([x, neg], k).flatten()
                })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn homogeneity(xs in values(), alpha in rational()) {
        let scaled: Vec<LimitScalar> = xs.iter().map(|x| &alpha * x).collect();
        prop_assert_eq!(nary_boxplus(&scaled), &alpha * nary_boxplus(&xs));
    }

    #[test]
    fn one_signed_sets_reduce_to_max_or_min(xs in prop::collection::vec(rational(), 1..10)) {
        let pos: Vec<LimitScalar> = xs.iter().map(LimitScalar::abs).collect();
        prop_assert_eq!(nary_boxplus(&pos), pos.iter().cloned().max().unwrap());
        let neg: Vec<LimitScalar> = pos.iter().map(|x| -x).collect();
        prop_assert_eq!(nary_boxplus(&neg), neg.iter().cloned().min().unwrap());
    }

    #[test]
    fn magnitude_bound(xs in values()) {
        let abs: Vec<LimitScalar> = xs.iter().map(LimitScalar::abs).collect();
        let top = abs.iter().cloned().max().unwrap_or_else(LimitScalar::zero);
        prop_assert_eq!(nary_boxplus(&abs), top.clone());
        prop_assert!(nary_boxplus(&xs).abs() <= top);
    }

    #[test]
    fn binary_decomposition(u in small_int(), v in small_int()) {
        let half = (smile2(&u, &v, Smile::Lower) + smile2(&u, &v, Smile::Upper)) / LimitScalar::from_int(2);
        prop_assert_eq!(boxplus(&u, &v), half);
    }

    #[test]
    fn duality(xs in values()) {
        let neg: Vec<LimitScalar> = xs.iter().map(|x| -x).collect();
        prop_assert_eq!(smile(&xs, Smile::Upper), -smile(&neg, Smile::Lower));
    }

    #[test]
    fn sandwich(xs in values()) {
        let lo = smile(&xs, Smile::Lower);
        let hi = smile(&xs, Smile::Upper);
        let mid = nary_boxplus(&xs);
        prop_assert!(lo <= mid && mid <= hi);
    }

    #[test]
    fn smiles_are_associative(x in small_int(), y in small_int(), z in small_int()) {
        for mode in [Smile::Lower, Smile::Upper] {
            prop_assert_eq!(
                smile2(&smile2(&x, &y, mode), &z, mode),
                smile2(&x, &smile2(&y, &z, mode), mode)
            );
        }
    }

    #[test]
    fn cancellation_persists_at_every_p(xs in balanced_multiset()) {
        prop_assert!(nary_boxplus(&xs).is_zero());
        for p in [0, 1, 2, 5, 13, 40, 64] {
            prop_assert_eq!(phi_p_sum_scalars(&xs, PIndex::new(p)), SignedLog::ZERO);
        }
    }

    #[test]
    fn product_identity(x in values(), y in values()) {
        let products: Vec<LimitScalar> = x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
        prop_assert_eq!(nary_boxplus(&x) * nary_boxplus(&y), nary_boxplus(&products));
    }

    #[test]
    fn inner_product_bound(pairs in prop::collection::vec((rational(), rational()), 1..8)) {
        let (x, y): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let mx = x.iter().map(LimitScalar::abs).max().unwrap();
        let my = y.iter().map(LimitScalar::abs).max().unwrap();
        prop_assert!(inner_limit(&x, &y).unwrap().abs() <= mx * my);
    }

    #[test]
    fn phi_sums_approach_boxplus(xs in prop::collection::vec(rational(), 1..6)) {
        let limit = nary_boxplus(&xs);
        let at = |p: u32| phi_p_sum_scalars(&xs, PIndex::new(p)).to_f64();
        if limit.is_zero() {
            prop_assert_eq!(at(64), 0.0);
        } else {
            // the gap at p = 64 is at most ln(len) / 129 relative to the limit
            let gap = (at(64) - limit.to_f64()).abs() / limit.to_f64().abs();
            prop_assert!(gap <= (xs.len() as f64).ln() / 129.0 + 1e-3, "gap {}", gap);
        }
    }
}
