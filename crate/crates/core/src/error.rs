use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate target id {0:?}")]
    DuplicateTarget(String),

    #[error("{origin}:{line}: {message}")]
    Lexicon { origin: String, line: usize, message: String },

    #[error("grammar table line {line}: {message}")]
    Grammar { line: usize, message: String },

    #[error("document body is empty")]
    EmptyBody,

    #[error("text progression {0} is outside [0, 1]")]
    InvalidProgression(f64),

    #[error("reference key {0:?} is not in the reference list")]
    UnknownReference(String),

    #[error("cosine undefined for a zero vector")]
    ZeroVector,

    #[error("vector dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("reference set is empty")]
    EmptyReferenceSet,

    #[error("embedding transport error: {message}")]
    Transport { message: String, retryable: bool },

    #[error("embedding provider returned an invalid response: {0}")]
    Provider(String),

    #[error("invalid embedding spec {0:?} (expected file:PATH, url:URL or test)")]
    EmbeddingSpec(String),

    #[error("invalid scenario at {field}: {message}")]
    Scenario { field: String, message: String },

    #[error("cannot start worker threads: {0}")]
    ThreadPool(String),

    #[error("no records to analyze")]
    EmptyAnalysis,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Transport { retryable: true, .. })
    }
}
