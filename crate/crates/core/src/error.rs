use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(crate::FieldSpec, crate::FieldSpec),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid Lie algebra: {0}")]
    InvalidLie(String),
    #[error("invalid crossed module: {0}")]
    InvalidXMod(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A consistency check that can only fail if an upstream computation is wrong.
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
