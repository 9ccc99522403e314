use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar modes differ: {0} vs {1}")]
    ModeMismatch(String, String),

    #[error("operation needs exact arithmetic, got {0}")]
    InexactMode(String),

    #[error("minor size {size} exceeds matrix of size {rows}x{cols}")]
    MinorTooLarge { size: usize, rows: usize, cols: usize },

    #[error("polynomial is not divisible by the divisor")]
    NotDivisible,

    #[error("division by zero")]
    DivisionByZero,

    #[error("no value assigned to variable {0}")]
    MissingVariable(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed tensor data: {0}")]
    MalformedTensor(String),

    #[error("expected rank {expected}, found {found}")]
    WrongRank { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid LM family: {0}")]
    InvalidFamily(String),

    #[error("term budget of {cap} exceeded while {context}")]
    BudgetExceeded { cap: usize, context: String },

    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
