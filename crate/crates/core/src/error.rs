use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("solver did not converge after {iterations} operator applications (best residual {best_residual:.3e})")]
    Convergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("degenerate steady state: {0}")]
    Degeneracy(String),

    #[error("found only {} of {wanted} qualifying decay modes (eigenvalues: {found:?})", found.len())]
    PartialModes { wanted: usize, found: Vec<f64> },

    #[error("spectrum is empty after discarding {discarded} numerically-zero eigenvalues")]
    EmptySpectrum { discarded: usize },

    #[error("sample too small: need at least {needed}, got {got}")]
    SampleSize { needed: usize, got: usize },

    #[error("dense eigensolver failed: {0}")]
    DenseEigen(String),

    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
