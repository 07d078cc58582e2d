use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure category, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or configuration supplied by the caller.
    Config,
    /// Input data is malformed, incomplete or inconsistent.
    Data,
    /// A numerical procedure could not produce a result.
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numeric => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at data row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("input contains no data rows")]
    EmptyData,

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("feature pipeline error: {0}")]
    Pipeline(String),

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("perturbation error: {0}")]
    Perturbation(String),

    #[error("too many features for exact enumeration: {count} > {limit}; use a sampling estimator instead")]
    CombinatorialLimit { count: usize, limit: usize },

    #[error("while evaluating {context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parameter(_) | Error::Config(_) | Error::UnknownFeature(_) => ErrorKind::Config,
            Error::CombinatorialLimit { .. } => ErrorKind::Config,
            Error::Training(_)
            | Error::Degenerate(_)
            | Error::Numeric(_)
            | Error::Perturbation(_) => ErrorKind::Numeric,
            Error::Context { source, .. } => source.kind(),
            Error::Json(_) => ErrorKind::Data,
            _ => ErrorKind::Data,
        }
    }

    /// Wraps the error with a description of what was being evaluated.
    pub fn context(self, context: impl fmt::Display) -> Error {
        Error::Context {
            context: context.to_string(),
            source: Box::new(self),
        }
    }
}
