use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Numerical,
    Input,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: no edge lines found")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not symmetric: |a({row},{col}) - a({col},{row})| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigendecomposition did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("vector norm {norm:e} is below the zero threshold 1e-12")]
    ZeroVector { norm: f64 },

    #[error(
        "neumann alpha {alpha} out of range: need 0 <= alpha < 1/|lambda_1| = {bound} (|lambda_1| = {spectral_radius})"
    )]
    NeumannDomain {
        alpha: f64,
        spectral_radius: f64,
        bound: f64,
    },

    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),

    #[error("exponential kernel overflow: alpha * lambda = {exponent} exceeds 700")]
    ExponentialOverflow { exponent: f64 },

    #[error("{model} regression needs at least {minimum} points, got {found}")]
    InsufficientPoints {
        model: &'static str,
        minimum: usize,
        found: usize,
    },

    #[error("not enough non-edges: requested {requested}, only {available} available")]
    InsufficientNonEdges { requested: usize, available: usize },

    #[error("monotone repair touched {repaired} of {edges} edges, above the 10% bound")]
    RepairBoundExceeded { repaired: usize, edges: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::EmptyInput | Error::Io(_) | Error::Json(_) => {
                ErrorKind::Input
            }
            Error::InvalidArgument(_)
            | Error::IndexOutOfRange { .. }
            | Error::NegativeAlpha(_)
            | Error::InsufficientPoints { .. } => ErrorKind::Usage,
            Error::DimensionMismatch { .. }
            | Error::NotSymmetric { .. }
            | Error::NonFinite { .. }
            | Error::NoConvergence { .. }
            | Error::ZeroVector { .. }
            | Error::NeumannDomain { .. }
            | Error::ExponentialOverflow { .. }
            | Error::InsufficientNonEdges { .. }
            | Error::RepairBoundExceeded { .. } => ErrorKind::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
