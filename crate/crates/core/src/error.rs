use thiserror::Error;

/// Errors raised by the exact and semi-exact analyses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("zero vector")]
    ZeroVector,
    #[error("generators {0} and {1} do not commute")]
    NotCommuting(String, String),
    #[error("operation requires group mode")]
    NotGroupMode,
    #[error("generator {0} has non-integer entries")]
    NonIntegerEntries(String),
    #[error("generator {0} is not unimodular")]
    NotUnimodular(String),
    #[error("grid of {states} states exceeds the cap of {cap}")]
    GridTooLarge { states: u128, cap: u128 },
    #[error("character {0} is not in the rational span of the previous level")]
    NotInSpan(String),
    #[error("no relation with cost at most {0}")]
    KExceeded(u64),
    #[error("lift out of range: {0}")]
    LiftOutOfRange(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("window has no value for character {0}")]
    MissingCharacter(String),
    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}
