use thiserror::Error;

/// Errors raised by the limit-arithmetic routines.
///
/// Mathematical infeasibility (a singular limit system, a max system with no
/// solution) is reported through `Option`/report values, never through this
/// type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("enumeration capacity exceeded: size {size} is above the cap {cap}")]
    Capacity { size: usize, cap: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (last gap {gap:e})")]
    Convergence { iterations: usize, gap: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("at p = {p}: {source}")]
    AtP {
        p: u32,
        #[source]
        source: Box<BoxError>,
    },
}

impl BoxError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        BoxError::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        BoxError::Dimension(msg.into())
    }

    /// Strips any `AtP` wrappers.
    pub fn root(&self) -> &BoxError {
        match self {
            BoxError::AtP { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self.root(), BoxError::Capacity { .. })
    }
}

pub type Result<T> = std::result::Result<T, BoxError>;
