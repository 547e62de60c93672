//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure mode the library reports.
///
/// The CLI maps these onto its documented exit codes: convergence failures
/// (`NoConvergence`, `ArgumentCap`) exit 2, hypothesis failures
/// (`CriticalExponent`, `DivergentSeries`, `Regime`) exit 3, and everything
/// else exits 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("perturbation envelope produced an invalid value {value}")]
    InvalidEnvelope { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("wrong number of arguments: expected {expected}, got {actual}")]
    Arity { expected: usize, actual: usize },

    #[error("input is not {expected} (max parity violation {max_violation:.3e})")]
    Parity {
        expected: &'static str,
        max_violation: f64,
    },

    #[error(
        "growth exponent p = {p} sits at the critical value {critical}; \
         neither scaling direction is summable"
    )]
    CriticalExponent { p: f64, critical: f64 },

    #[error("no convergence after {iterations} iterations (last delta {last_delta:.3e})")]
    NoConvergence { iterations: usize, last_delta: f64 },

    #[error("iteration argument norm {norm:.3e} exceeds the configured cap {cap:.3e}")]
    ArgumentCap { norm: f64, cap: f64 },

    #[error("series diverges: term ratio {ratio} >= 1")]
    DivergentSeries { ratio: f64 },

    #[error("exponent p = {p} is outside the regime of {corollary}")]
    Regime { corollary: &'static str, p: f64 },

    #[error("least-squares design matrix is singular")]
    SingularFit,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
