use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch point z = {0}: sheets are not distinguished there")]
    BranchPoint(f64),
    #[error("branch choice is ambiguous: {0}")]
    BranchChoice(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e}): {context}")]
    Convergence {
        context: String,
        iterations: usize,
        residual: f64,
    },
    #[error("degenerate system: {0}")]
    Degeneracy(String),
    #[error("insufficient precision: {0}; increase mantissa bits")]
    Precision(String),
    #[error("expected {expected} zeros, found {}: {points:?}", points.len())]
    Count { expected: usize, points: Vec<f64> },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
