use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document{}: {message}", position_suffix(*.line, *.column))]
    MalformedDocument {
        message: String,
        line: Option<u64>,
        column: Option<u64>,
    },

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error("unsupported relation `{0}` (only `=` is accepted)")]
    UnsupportedRelation(String),

    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),

    #[error("invalid pipeline configuration: {0}")]
    InvalidPipeline(String),

    #[error("WordNet lexicon unavailable at {path}: {reason}")]
    LexiconUnavailable { path: PathBuf, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("entity text must not be empty")]
    EmptyEntityText,

    #[error("unknown entity `{0}`")]
    UnknownEntity(String),

    #[error("invalid provider configuration: {0}")]
    InvalidProvider(String),

    #[error("provider unavailable after {attempts} attempt(s): {message}")]
    ProviderUnavailable { attempts: u32, message: String },

    #[error("provider quota exceeded: {0}")]
    QuotaExceeded(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cache record is not valid JSON: {0}")]
    Cache(#[from] serde_json::Error),
}

fn position_suffix(line: Option<u64>, column: Option<u64>) -> String {
    match (line, column) {
        (Some(line), Some(column)) => format!(" at line {line}, column {column}"),
        (Some(line), None) => format!(" at line {line}"),
        _ => String::new(),
    }
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    pub(crate) fn malformed(message: impl Into<String>) -> Self {
        Error::MalformedDocument { message: message.into(), line: None, column: None }
    }
}
