use thiserror::Error;

/// Errors produced by grid construction, scheme evaluation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("node {0} is not an interior node")]
    NotInterior(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("non-finite residual at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid user input rather than a failed computation.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::LengthMismatch { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
