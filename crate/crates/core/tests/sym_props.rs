use boxalg::sym::{
    balanced, embed_matrix, s_add, s_det, s_mul, slog_roundtrip, v_identity_check, SClass, SPair,
};
use boxalg::{BoxMatrix, LimitScalar};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = SPair> {
    (0i64..=6, 0i64..=6).prop_map(|(p, m)| SPair::from_ints(p, m).unwrap())
}

fn unbalanced_pair() -> impl Strategy<Value = SPair> {
    pair().prop_filter("balanced", |x| x.class() != SClass::Balanced)
}

fn square(max_n: usize) -> impl Strategy<Value = BoxMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-5i64..=5).prop_map(LimitScalar::from_int), n * n)
            .prop_map(move |e| BoxMatrix::new(n, n, e).unwrap())
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..n).map(move |k| {
                let mut q = p.clone();
                q.insert(k, n - 1);
                q
            })
        })
        .collect()
}

fn is_even(perm: &[usize]) -> bool {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    inversions % 2 == 0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn addition_is_associative(x in pair(), y in pair(), z in pair()) {
        prop_assert_eq!(s_add(&s_add(&x, &y), &z), s_add(&x, &s_add(&y, &z)));
    }

    #[test]
    fn multiplication_is_associative(x in pair(), y in pair(), z in pair()) {
        prop_assert_eq!(s_mul(&s_mul(&x, &y), &z), s_mul(&x, &s_mul(&y, &z)));
    }

    #[test]
    fn v_identity_without_balanced_summands(xs in prop::collection::vec(unbalanced_pair(), 1..7)) {
        prop_assert!(v_identity_check(&xs));
    }

    #[test]
    fn determinant_balance_matches_signed_products(a in square(4)) {
        let n = a.rows();
        let (mut top_pos, mut top_neg) = (LimitScalar::zero(), LimitScalar::zero());
        for perm in permutations(n) {
            let mut prod = perm.iter().enumerate().fold(LimitScalar::one(), |acc, (i, &j)| acc * a.get(i, j));
            if !is_even(&perm) {
                prod = -prod;
            }
            if prod.is_positive() {
                top_pos = top_pos.max(prod);
            } else {
                top_neg = top_neg.max(-prod);
            }
        }
        let det = s_det(&embed_matrix(&a)).unwrap();
        prop_assert_eq!(det.plus(), &top_pos);
        prop_assert_eq!(det.minus(), &top_neg);
        prop_assert_eq!(balanced(&det, &SPair::zero()), top_pos == top_neg);
    }

    #[test]
    fn signed_log_roundtrip(n in -1000i64..=1000, d in 1i64..=50, m in -1000i64..=1000, e in 1i64..=50) {
        prop_assert!(slog_roundtrip(&LimitScalar::ratio(n, d), &LimitScalar::ratio(m, e)));
    }
}
