use thiserror::Error;

/// Errors raised by the curvature laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("algebra failed validation: {0}")]
    Validation(String),

    #[error("span is not a subalgebra (closure residual {residual:.3e})")]
    NotASubalgebra { residual: f64 },

    #[error("generators are linearly dependent (rank {rank} of {requested})")]
    DependentGenerators { rank: usize, requested: usize },

    #[error("degenerate plane (Gram determinant {area_sq:.3e})")]
    DegeneratePlane { area_sq: f64 },

    #[error("vectors do not commute (bracket norm {residual:.3e})")]
    NotCommuting { residual: f64 },

    #[error("subspace is not invariant (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("algebra has rank {rank}, at least 2 is required")]
    RankDeficient { rank: usize },

    #[error("ideal decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
