use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is reducible over the rationals: {0}")]
    Reducible(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("unsupported field: {0}")]
    Unsupported(String),
    #[error("sublattice is not contained in the ambient lattice")]
    NotContained,
    #[error("rank deficient: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("element is not integral")]
    NonIntegral,
    #[error("enumeration cap exceeded: estimated {estimate:.3e} points, cap {cap} ({context})")]
    CapExceeded {
        estimate: f64,
        cap: usize,
        context: String,
    },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
