use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("empty {0} split")]
    EmptySplit(&'static str),

    #[error("lexicon `{name}`: {message}")]
    Lexicon { name: String, message: String },

    #[error("knowledge tree at {path}: {message}")]
    KnowledgeTree { path: String, message: String },

    #[error("collinear design columns: {}", .0.join(", "))]
    Collinear(Vec<String>),

    #[error("feature `{0}` has no within-domain variation")]
    NoWithinDomainVariation(String),

    #[error("non-finite value in column `{0}`")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numeric failures (convergence, singular systems) as opposed to bad data.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Collinear(_) | Error::Numeric(_) | Error::NonFinite(_))
    }
}
