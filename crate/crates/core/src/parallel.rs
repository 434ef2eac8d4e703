//! Sequential or data-parallel evaluation of independent work items.
//!
//! Results are always assembled in item order, so both strategies produce
//! identical output.

/// Evaluation strategy for enumerations and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool; falls back to sequential evaluation when
    /// the crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `f(0), ..., f(n-1)` in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Concatenation of `f(0), ..., f(n-1)`.
    pub fn flat_map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> Vec<T> + Sync + Send,
    {
        self.map(n, f).into_iter().flatten().collect()
    }

    /// `f(0), ..., f(n-1)` in order, stopping at the first error.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}
