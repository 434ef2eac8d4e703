//! Exact arithmetic for the limit of generalized power-mean algebra.
//!
//! The φ_p-sum `(Σ x_i^(2p+1))^(1/(2p+1))` tends, as `p → ∞`, to an
//! idempotent, symmetric, non-associative operation `⊞`. This crate
//! implements that limit exactly over rationals together with its linear
//! algebra (determinants, Cramer solutions, hyperplanes, characteristic
//! polynomials), its regularized associative variants `⌣-` / `⌣+`, the
//! max-times systems it solves, and a finite-p oracle that checks every limit
//! formula against the φ_p arithmetic it came from.

pub mod algebra;
pub mod eigen;
pub mod error;
pub mod geom;
pub mod linalg;
pub mod oracle;
pub mod parallel;
pub mod perm;
pub mod scalar;
pub mod signed_log;
pub mod solve;
pub mod sym;

pub use algebra::{boxminus, boxplus, nary_boxplus, residual_set, smile, xi, Smile};
pub use error::{BoxError, Result};
pub use linalg::{det_inf, det_inf_reg, det_p, BoxMatrix, BoxVector, ProductMode};
pub use parallel::Execution;
pub use perm::Enumeration;
pub use scalar::{IndexSet, LimitScalar, PIndex};
pub use signed_log::{phi_p_sum, SignedLog};
