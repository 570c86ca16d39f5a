use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {n} exceeds the enumeration guard {guard}")]
    GuardExceeded { n: usize, guard: usize },

    #[error("invalid rational literal {0:?}")]
    BadRational(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("premise violated: {0}")]
    Premise(String),

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExceeded { budget: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
