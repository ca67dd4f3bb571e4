use std::path::PathBuf;

use thiserror::Error;

use crate::model::AxisClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("input too short: {what} (need at least {needed}, got {got})")]
    TooShort {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("unknown letter {0:?}")]
    UnknownLetter(char),

    #[error("unsupported training set format_version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("corrupt training set: {0}")]
    CorruptSet(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("degenerate mixture fit: {0}")]
    DegenerateFit(&'static str),

    #[error("no jerks detected")]
    NoJerksDetected,

    #[error("spline fit needs at least 4 distinct time points, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate segment: {0}")]
    DegenerateSegment(&'static str),

    #[error("shape mismatch: {0} vs {1} points")]
    Shape(usize, usize),

    #[error("no training templates for axis class {0}")]
    NoTemplatesForAxis(AxisClass),

    #[error("empty experiment (n * k = 0)")]
    EmptyExperiment,

    #[error("segmentation mismatch: expected {expected} letters, found {found}")]
    SegmentationMismatch { expected: usize, found: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
