use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by corpus I/O, validation, and the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate episode id {0:?}")]
    DuplicateId(String),

    #[error("episode {id:?}: {reason}")]
    InvalidEpisode { id: String, reason: String },

    #[error("span [{start}, {end}) out of bounds for source of length {len}")]
    SpanOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("sentence index {index} out of range for document of {len} sentences")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("degenerate training set: needs at least one example of each class")]
    DegenerateTraining,

    #[error("length mismatch: {left} predicted vs {right} gold labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("peak at {peak}s has no candidate points on one side of the search window")]
    PeakAtBoundary { peak: usize },

    #[error("unsupported model file version {found}")]
    ModelVersion { found: u32 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
