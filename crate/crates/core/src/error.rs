use thiserror::Error;

#[derive(Debug, Error)]
pub enum GhError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("point outside the chart domain: {0}")]
    Domain(String),

    #[error("unsupported chart: {0}")]
    Chart(String),

    #[error("quadrature did not converge ({message}); best estimate {estimate}")]
    Convergence { estimate: f64, message: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("evaluation failed at node {node}: {message}")]
    Evaluation { node: String, message: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GhError>;

impl GhError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        GhError::Parameter(msg.into())
    }
}
