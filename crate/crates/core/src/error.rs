use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// H₀-type smallness condition fails, so the step bound is nonpositive.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("inadmissible step: tau = {tau} does not satisfy the bound {bound}")]
    InadmissibleStep { tau: f64, bound: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("nonconvergence at step {step}: residual {residual:e} after {iterations} iterations")]
    Nonconvergence {
        step: usize,
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
        history: Vec<f64>,
    },

    #[error("certificate failure at step {step}: {reason}")]
    Certificate { step: usize, reason: String },

    #[error("study failure: {0}")]
    Study(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
