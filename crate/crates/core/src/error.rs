use thiserror::Error;

/// Errors shared across the symbolic and numeric layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("argument count mismatch: expected {expected}, got {got}")]
    ArgCount { expected: usize, got: usize },

    #[error("Poisson structure is not Jacobi-verified: {0}")]
    NotVerified(String),

    #[error("expected a homogeneous element of degree {0}")]
    WrongDegree(usize),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("parse error at line {line} column {column}: {message}")]
    ParseFile {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("non-closed truncation: {0}")]
    NonClosedTruncation(String),

    #[error("star operator hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("chart invariant violated: {0}")]
    ChartInvariant(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("tangent vector outside the range of the structure (residual {0:e})")]
    OutsideRange(f64),

    #[error("degenerate form: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
