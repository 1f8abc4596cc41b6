use thiserror::Error;

/// Error type shared by all solver components.
#[derive(Debug, Error)]
pub enum HystError {
    #[error("invalid play threshold r = {0}; thresholds must be finite and nonnegative")]
    InvalidThreshold(f64),

    #[error("input {value} outside the declared range [{lo}, {hi}]")]
    RangeExceeded { value: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("step {step} did not converge after {iterations} iterations (residual {residual:e}, relaxation {relaxation})")]
    StepFailure {
        step: usize,
        iterations: usize,
        residual: f64,
        relaxation: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration rejected:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl HystError {
    pub fn dim(msg: impl Into<String>) -> Self {
        HystError::DimensionMismatch(msg.into())
    }

    pub fn arg(msg: impl Into<String>) -> Self {
        HystError::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HystError>;
