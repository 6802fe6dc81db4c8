use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the toolkit.
///
/// Variants are grouped by the kind of failure so front ends can map them
/// onto exit codes (see [`Error::category`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error at index {index}: {message}")]
    Domain { index: usize, message: String },

    #[error("series too short: need more than {needed} observations, got {got} ({context})")]
    Length {
        needed: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("rank deficient regression: {0}")]
    Rank(String),

    #[error("invalid coefficients: {0}")]
    Validity(String),

    #[error("ill-conditioned state covariance: {0}")]
    Conditioning(String),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best_value})")]
    Convergence {
        iterations: usize,
        best_value: f64,
        best_params: Vec<f64>,
    },

    #[error("calendar alignment error: {0}")]
    Alignment(String),

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("no data rows")]
    NoData,

    #[error("no admissible model: {0}")]
    NoAdmissibleModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numeric,
    NoAdmissibleModel,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Argument(_) | Error::Shape(_) => ErrorCategory::Usage,
            Error::Domain { .. }
            | Error::Length { .. }
            | Error::Alignment(_)
            | Error::Parse { .. }
            | Error::NoData
            | Error::Io(_)
            | Error::Json(_) => ErrorCategory::Data,
            Error::DegenerateVariance(_)
            | Error::Rank(_)
            | Error::Validity(_)
            | Error::Conditioning(_)
            | Error::Convergence { .. } => ErrorCategory::Numeric,
            Error::NoAdmissibleModel(_) => ErrorCategory::NoAdmissibleModel,
        }
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
