use std::path::PathBuf;

use crate::model::Label;

/// Errors raised by the substitution engine and the evaluation harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("surface is empty after whitespace normalization")]
    EmptyCanonical,

    #[error("external detector unavailable: {0}")]
    DetectorUnavailable(String),
    #[error("external detector protocol violation: {0}")]
    DetectorProtocol(String),

    #[error("demonstration pool `{pool}` has {size} demos, at least {required} are required")]
    PoolTooSmall { pool: String, size: usize, required: usize },
    #[error("invalid prompt input: {0}")]
    InvalidInput(String),
    #[error("invalid demonstration pool file: {0}")]
    PoolFormat(String),

    #[error("label {0} cannot be routed to an SLM backend")]
    NotSlmLabel(Label),
    #[error("SLM backend `{backend}` failed {failures} consecutive times")]
    BackendUnhealthy { backend: String, failures: usize },
    #[error("unknown SLM backend `{0}`")]
    UnknownBackend(String),

    #[error("spans overlap: [{0}, {1}) and [{2}, {3})")]
    SpliceOverlap(usize, usize, usize, usize),
    #[error("span [{start}, {end}) is out of bounds for a document of length {len}")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },

    #[error("se is zero, Welch statistic undefined")]
    DegenerateVariance,
    #[error("invalid statistics input: {0}")]
    InvalidStatistic(String),

    #[error("corpus record {index}: {message}")]
    CorpusFormat { index: usize, message: String },
    #[error("NER experiment: {0}")]
    Experiment(String),

    #[error("cache file: {0}")]
    CacheFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
