//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("band of {band} coefficients does not fit in dimension {dim}")]
    OversizedBand { band: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol must be real-valued for this operation")]
    NonRealSymbol,

    #[error("not a valid state: {0}")]
    NotAState(String),

    #[error("state orthogonal to truncation window")]
    StateOrthogonalToWindow,

    #[error("basis is ill-conditioned (Gram condition number {condition:.3e})")]
    IllConditionedBasis { condition: f64 },

    #[error("{0}")]
    OutOfWindow(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
