use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed bracket expression at byte {pos}: {msg}")]
    MalformedExpression { pos: usize, msg: String },
    #[error("flow integration failed at block {block}: {reason}")]
    FlowFailure { block: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(what: &str, expected: impl std::fmt::Display, got: impl std::fmt::Display) -> Error {
    Error::DimensionMismatch(format!("{what}: expected {expected}, got {got}"))
}
