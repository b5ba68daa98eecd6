use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("layer index {index} out of range for a network with {layers} layers")]
    Index { index: usize, layers: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("degenerate batch: row {row} has standard deviation {sigma:e}")]
    DegenerateBatch { row: usize, sigma: f64 },

    #[error("Gram matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("precondition <W0, W*> > 0 violated (inner product {inner})")]
    PreconditionUnmet { inner: f64 },

    #[error("standard optimum is the zero vector")]
    ZeroOptimum,

    #[error("no restart converged within {max_iters} iterations")]
    NoConvergence { max_iters: usize },

    #[error("instance generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
