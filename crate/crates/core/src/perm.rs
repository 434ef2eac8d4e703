//! Permutation enumeration (Heap's algorithm) with sign tracking.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{BoxError, Result};
use crate::parallel::Execution;
use crate::scalar::LimitScalar;

/// Default cap on the dimension of explicit permutation enumerations.
pub const DEFAULT_CAP: usize = 9;

/// Default cap for characteristic-polynomial enumerations, which visit
/// every partial permutation.
pub const DEFAULT_CHARPOLY_CAP: usize = 7;

/// Size cap and evaluation strategy for factorial enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    pub cap: usize,
    pub execution: Execution,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration {
            cap: DEFAULT_CAP,
            execution: Execution::default(),
        }
    }
}

impl Enumeration {
    pub fn with_cap(cap: usize) -> Self {
        Enumeration {
            cap,
            ..Enumeration::default()
        }
    }

    pub fn sequential(self) -> Self {
        Enumeration {
            execution: Execution::Sequential,
            ..self
        }
    }

    pub fn parallel(self) -> Self {
        Enumeration {
            execution: Execution::Parallel,
            ..self
        }
    }

    pub fn check(&self, size: usize) -> Result<()> {
        if size > self.cap {
            Err(BoxError::Capacity {
                size,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Calls `visit(perm, even)` for every ordering of `items`, each reached from
/// the previous one by a single transposition. `even` is the parity relative
/// to the starting order, offset by `start_even`.
pub fn heap_permutations<F>(items: &mut [usize], start_even: bool, mut visit: F)
where
    F: FnMut(&[usize], bool),
{
    let n = items.len();
    let mut even = start_even;
    visit(items, even);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            even = !even;
            visit(items, even);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Every permutation of `items` with its parity, in a fixed order: grouped by
/// the image of the first position, then in Heap order within each group.
/// Groups are evaluated with `execution`; `f` maps a permutation and its
/// parity to an output value.
pub fn map_permutations<T, F>(items: &[usize], execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[usize], bool) -> T + Sync + Send,
{
    let n = items.len();
    if n == 0 {
        return vec![f(&[], true)];
    }
    execution.flat_map(n, |k| {
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        perm.push(items[k]);
        let mut rest: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &x)| x)
            .collect();
        let mut out = Vec::new();
        // moving position k to the front costs k transpositions
        heap_permutations(&mut rest, k % 2 == 0, |tail, even| {
            perm.truncate(1);
            perm.extend_from_slice(tail);
            out.push(f(&perm, even));
        });
        out
    })
}

/// Exact product of the given factors, reducing the fraction once.
pub fn exact_product<'a, I>(factors: I) -> LimitScalar
where
    I: IntoIterator<Item = &'a LimitScalar>,
{
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for x in factors {
        if x.is_zero() {
            return LimitScalar::zero();
        }
        num *= x.numer();
        den *= x.denom();
    }
    LimitScalar::new(num, den).expect("denominators are nonzero")
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}
