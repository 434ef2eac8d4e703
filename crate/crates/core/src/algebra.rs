//! Scalar operations of the limit algebra.
//!
//! The n-ary boxplus is the limit of φ_p-sums as `p → ∞`. It is idempotent,
//! symmetric (`x ⊞ -x = 0`) and not associative, so it is always evaluated
//! over a whole multiset at once: values of equal magnitude and opposite
//! sign cancel in pairs, and the largest surviving magnitude decides the
//! result.
//!
//! The regularized operators `⌣-` / `⌣+` are the associative lower/upper
//! semi-continuous versions: a tie between `+M` and `-M` resolves to the
//! negative or the positive extreme instead of cancelling.

use std::cmp::Ordering;

use crate::error::{BoxError, Result};
use crate::scalar::{IndexSet, LimitScalar, PIndex};
use crate::signed_log::{phi_p_sum, SignedLog};

/// Which semi-continuous regularization to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smile {
    /// `⌣-`: opposite-sign ties resolve to the negative extreme.
    Lower,
    /// `⌣+`: opposite-sign ties resolve to the positive extreme.
    Upper,
}

/// Distinct magnitudes with their net sign count, largest magnitude first.
///
/// Zero entries are dropped. Sorting keeps this O(n log n).
pub fn magnitude_groups<'a, I>(xs: I) -> Vec<(LimitScalar, i64)>
where
    I: IntoIterator<Item = &'a LimitScalar>,
{
    let mut signed: Vec<(LimitScalar, i8)> = xs
        .into_iter()
        .filter(|x| !x.is_zero())
        .map(|x| (x.abs(), x.signum()))
        .collect();
    signed.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let mut groups: Vec<(LimitScalar, i64)> = Vec::new();
    for (mag, sign) in signed {
        match groups.last_mut() {
            Some((m, net)) if *m == mag => *net += sign as i64,
            _ => groups.push((mag, sign as i64)),
        }
    }
    groups
}

fn checked_subset<'a>(xs: &'a [LimitScalar], set: &IndexSet) -> Result<Vec<&'a LimitScalar>> {
    set.check_within(xs.len())?;
    Ok(set.zero_based().map(|i| &xs[i]).collect())
}

/// `ξ_I[x](α)`: occurrences of `α` minus occurrences of `-α` among the
/// indexed entries.
pub fn xi(xs: &[LimitScalar], set: &IndexSet, alpha: &LimitScalar) -> Result<i64> {
    let neg_alpha = -alpha;
    let mut count = 0i64;
    for x in checked_subset(xs, set)? {
        if x == alpha {
            count += 1;
        }
        if *x == neg_alpha {
            count -= 1;
        }
    }
    Ok(count)
}

/// The residual index set: positions of `I` whose value is not balanced by
/// an equal number of opposite values.
pub fn residual_set(xs: &[LimitScalar], set: &IndexSet) -> Result<IndexSet> {
    set.check_within(xs.len())?;
    let groups = magnitude_groups(set.zero_based().map(|i| &xs[i]));
    let surviving = set.as_slice().iter().copied().filter(|&i| {
        let x = &xs[i - 1];
        if x.is_zero() {
            return false;
        }
        let mag = x.abs();
        groups
            .binary_search_by(|(m, _)| mag.cmp(m))
            .map(|k| groups[k].1 != 0)
            .unwrap_or(false)
    });
    IndexSet::new(surviving)
}

/// The n-ary boxplus of the entries indexed by `set`.
pub fn nary_boxplus_indexed(xs: &[LimitScalar], set: &IndexSet) -> Result<LimitScalar> {
    let subset = checked_subset(xs, set)?;
    Ok(nary_boxplus_iter(subset))
}

/// The n-ary boxplus over every entry; `0` for an empty input.
pub fn nary_boxplus(xs: &[LimitScalar]) -> LimitScalar {
    nary_boxplus_iter(xs)
}

pub fn nary_boxplus_iter<'a, I>(xs: I) -> LimitScalar
where
    I: IntoIterator<Item = &'a LimitScalar>,
{
    let groups = magnitude_groups(xs);
    match groups.into_iter().find(|(_, net)| *net != 0) {
        Some((mag, net)) => {
            debug_assert!(!mag.is_zero());
            if net > 0 {
                mag
            } else {
                -mag
            }
        }
        // residual set empty: every magnitude is balanced
        None => LimitScalar::zero(),
    }
}

/// Binary boxplus: the larger magnitude wins; equal magnitudes average to
/// `x` (when `x = y`) or `0` (when `x = -y`).
pub fn boxplus(x: &LimitScalar, y: &LimitScalar) -> LimitScalar {
    match x.cmp_abs(y) {
        Ordering::Greater => x.clone(),
        Ordering::Less => y.clone(),
        Ordering::Equal => (x + y) / LimitScalar::from_int(2),
    }
}

/// `x ⊟ y = x ⊞ (-y)`.
pub fn boxminus(x: &LimitScalar, y: &LimitScalar) -> LimitScalar {
    boxplus(x, &-y)
}

/// Binary regularized operator `u ⌣∓ v`.
pub fn smile2(u: &LimitScalar, v: &LimitScalar, mode: Smile) -> LimitScalar {
    match u.cmp_abs(v) {
        Ordering::Greater => u.clone(),
        Ordering::Less => v.clone(),
        Ordering::Equal => match mode {
            Smile::Lower => u.clone().min(v.clone()),
            Smile::Upper => u.clone().max(v.clone()),
        },
    }
}

/// `x_1 ⌣∓ ... ⌣∓ x_m`; `0` for an empty input.
pub fn smile(xs: &[LimitScalar], mode: Smile) -> LimitScalar {
    smile_iter(xs, mode)
}

pub fn smile_iter<'a, I>(xs: I, mode: Smile) -> LimitScalar
where
    I: IntoIterator<Item = &'a LimitScalar>,
{
    let mut best_pos: Option<&LimitScalar> = None;
    let mut best_neg: Option<&LimitScalar> = None;
    for x in xs {
        if x.is_positive() {
            if best_pos.is_none_or(|b| x > b) {
                best_pos = Some(x);
            }
        } else if x.is_negative() && best_neg.is_none_or(|b| x < b) {
            best_neg = Some(x);
        }
    }
    match (best_pos, best_neg) {
        (None, None) => LimitScalar::zero(),
        (Some(p), None) => p.clone(),
        (None, Some(n)) => n.clone(),
        (Some(p), Some(n)) => match p.cmp_abs(n) {
            Ordering::Greater => p.clone(),
            Ordering::Less => n.clone(),
            Ordering::Equal => match mode {
                Smile::Lower => n.clone(),
                Smile::Upper => p.clone(),
            },
        },
    }
}

/// How a multiset of values is combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// φ_p-sum, evaluated in the signed-log domain.
    P(PIndex),
    /// n-ary boxplus.
    Limit,
    /// `⌣-` fold.
    Lower,
    /// `⌣+` fold.
    Upper,
}

/// Result of an [`Aggregation`]: exact for the limit flavors, signed-log for
/// finite p.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregated {
    Exact(LimitScalar),
    Finite(SignedLog),
}

impl Aggregated {
    pub fn to_f64(&self) -> f64 {
        match self {
            Aggregated::Exact(x) => x.to_f64(),
            Aggregated::Finite(x) => x.to_f64(),
        }
    }

    pub fn exact(self) -> Option<LimitScalar> {
        match self {
            Aggregated::Exact(x) => Some(x),
            Aggregated::Finite(_) => None,
        }
    }

    pub fn finite(self) -> Option<SignedLog> {
        match self {
            Aggregated::Finite(x) => Some(x),
            Aggregated::Exact(_) => None,
        }
    }
}

/// Combines exact values; the φ_p flavor goes through the
/// provenance-tracked signed-log constructor so exact cancellation survives.
pub fn aggregate(values: &[LimitScalar], how: Aggregation) -> Aggregated {
    match how {
        Aggregation::P(p) => {
            let logs: Vec<SignedLog> = values.iter().map(SignedLog::from_scalar).collect();
            Aggregated::Finite(phi_p_sum(&logs, p))
        }
        Aggregation::Limit => Aggregated::Exact(nary_boxplus(values)),
        Aggregation::Lower => Aggregated::Exact(smile(values, Smile::Lower)),
        Aggregation::Upper => Aggregated::Exact(smile(values, Smile::Upper)),
    }
}

fn products(x: &[LimitScalar], y: &[LimitScalar]) -> Result<Vec<LimitScalar>> {
    if x.len() != y.len() {
        return Err(BoxError::dimension(format!(
            "inner product of vectors of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).collect())
}

/// `⟨x, y⟩_p`, `⟨x, y⟩_∞` or the lower/upper B-forms.
pub fn inner(x: &[LimitScalar], y: &[LimitScalar], how: Aggregation) -> Result<Aggregated> {
    Ok(aggregate(&products(x, y)?, how))
}

/// `⟨x, y⟩_∞`.
pub fn inner_limit(x: &[LimitScalar], y: &[LimitScalar]) -> Result<LimitScalar> {
    Ok(nary_boxplus(&products(x, y)?))
}

/// `⟨x, y⟩_∞^∓`.
pub fn inner_smile(x: &[LimitScalar], y: &[LimitScalar], mode: Smile) -> Result<LimitScalar> {
    Ok(smile(&products(x, y)?, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::scalars;

    fn s(v: i64) -> LimitScalar {
        LimitScalar::from_int(v)
    }

    #[test]
    fn xi_counts_symmetric_occurrences() {
        let xs = scalars(&[-3, -2, 3, 3, 1, -3]);
        let all = IndexSet::full(6);
        assert_eq!(xi(&xs, &all, &s(3)).unwrap(), 0);
        assert_eq!(xi(&xs, &all, &s(2)).unwrap(), -1);
        assert_eq!(xi(&xs, &all, &s(7)).unwrap(), 0);
        assert!(xi(&xs, &IndexSet::new([7]).unwrap(), &s(1)).is_err());
    }

    #[test]
    fn residual_sets() {
        let xs = scalars(&[-3, -2, 3, 3, 1, -3]);
        let r = residual_set(&xs, &IndexSet::full(6)).unwrap();
        assert_eq!(r.as_slice(), &[2, 5]);
        assert!(residual_set(&scalars(&[1, -1]), &IndexSet::full(2)).unwrap().is_empty());
        assert_eq!(
            residual_set(&scalars(&[4, 4]), &IndexSet::full(2)).unwrap().as_slice(),
            &[1, 2]
        );
    }

    #[test]
    fn nary_examples() {
        assert_eq!(nary_boxplus(&scalars(&[-3, -2, 3, 3, 1, -3])), s(-2));
        assert_eq!(nary_boxplus(&scalars(&[0, 0, 0])), s(0));
        assert_eq!(nary_boxplus(&scalars(&[1, 2, -2, 3])), s(3));
        assert_eq!(nary_boxplus(&[]), s(0));
        // restricted index set
        let xs = scalars(&[-3, -2, 3, 3, 1, -3]);
        assert_eq!(nary_boxplus_indexed(&xs, &IndexSet::new([2, 5]).unwrap()).unwrap(), s(-2));
        assert_eq!(nary_boxplus_indexed(&xs, &IndexSet::new([1, 3]).unwrap()).unwrap(), s(0));
        assert_eq!(nary_boxplus_indexed(&xs, &IndexSet::empty()).unwrap(), s(0));
    }

    #[test]
    fn binary_ops() {
        assert_eq!(boxplus(&s(1), &s(-3)), s(-3));
        assert_eq!(boxplus(&s(5), &s(-5)), s(0));
        assert_eq!(boxplus(&s(4), &s(4)), s(4));
        assert_eq!(boxminus(&s(1), &s(2)), s(-2));
        assert_eq!(boxminus(&s(3), &s(2)), s(3));
        assert_eq!(boxminus(&s(7), &s(7)), s(0));
    }

    #[test]
    fn smile_examples() {
        assert_eq!(smile(&scalars(&[4, -4, -4, 4, -1]), Smile::Lower), s(-4));
        assert_eq!(smile(&scalars(&[4, -4, -4, 4, -1]), Smile::Upper), s(4));
        assert_eq!(smile(&scalars(&[1, 2, 3]), Smile::Lower), s(3));
        assert_eq!(smile(&scalars(&[-3, 0, -12]), Smile::Lower), s(-12));
        assert_eq!(smile(&scalars(&[-3, 0, -12]), Smile::Upper), s(-12));
        assert_eq!(smile(&[], Smile::Upper), s(0));
    }

    #[test]
    fn smile_is_a_left_fold_of_the_binary_operator() {
        let xs = scalars(&[2, -5, 5, 1, -5, 3]);
        for mode in [Smile::Lower, Smile::Upper] {
            let folded = xs[1..].iter().fold(xs[0].clone(), |acc, x| smile2(&acc, x, mode));
            assert_eq!(folded, smile(&xs, mode));
        }
    }

    #[test]
    fn inner_flavors() {
        let a = scalars(&[2, 3]);
        let x = vec![LimitScalar::ratio(1, 4), LimitScalar::ratio(1, 3)];
        assert_eq!(inner_limit(&a, &x).unwrap(), s(1));
        let a = scalars(&[-1, 1]);
        let x = scalars(&[3, 3]);
        assert_eq!(inner_smile(&a, &x, Smile::Lower).unwrap(), s(-3));
        assert_eq!(inner_smile(&a, &x, Smile::Upper).unwrap(), s(3));
        assert_eq!(inner(&a, &x, Aggregation::Limit).unwrap(), Aggregated::Exact(s(0)));
        // the φ_p flavor is exactly zero for the balanced pair
        match inner(&a, &x, Aggregation::P(PIndex::new(3))).unwrap() {
            Aggregated::Finite(v) => assert!(v.is_zero()),
            other => panic!("unexpected {other:?}"),
        }
        let e2 = scalars(&[0, 1, 0]);
        let y = scalars(&[7, -8, 9]);
        assert_eq!(inner_limit(&e2, &y).unwrap(), s(-8));
        assert!(inner_limit(&e2, &a).is_err());
    }
}
