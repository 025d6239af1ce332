use std::path::PathBuf;

/// Coarse failure class, used by the CLI to pick a stable exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad or inconsistent input data (files, corpora, test sets, models).
    Data,
    /// A translation backend failed (spawn, transport, protocol).
    Backend,
    /// A bug on our side.
    Internal,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid UTF-8 on line {line}")]
    InvalidUtf8 { path: PathBuf, line: usize },

    #[error("{path}: blank line {line} in parallel input")]
    BlankLine { path: PathBuf, line: usize },

    #[error("length mismatch {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("language mismatch: expected {expected}, found {found} ({context})")]
    LangMismatch {
        expected: String,
        found: String,
        context: String,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("requested {requested} items but only {available} available; oversample first")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("cannot split {size} records into {chunks} chunks")]
    ChunkTooMany { size: usize, chunks: usize },

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("test set {path}: {message}")]
    TestSetFormat { path: PathBuf, message: String },

    #[error("document {doc_id} has no origlang attribute")]
    MissingOriglang { doc_id: String },

    #[error("backend {id}: {message}")]
    Backend { id: String, message: String },

    #[error("backend {id}: batch at offset {offset}: {message}")]
    BackendBatch {
        id: String,
        offset: usize,
        message: String,
    },

    #[error("empty reference corpus")]
    EmptyReference,

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Backend { .. } | Error::BackendBatch { .. } => ErrorClass::Backend,
            Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
