use std::path::PathBuf;

use thiserror::Error;

use crate::descriptors::FeatureKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },

    #[error("frame {index} is {got_h}x{got_w}, expected {want_h}x{want_w}")]
    InconsistentFrameSize {
        index: usize,
        got_h: usize,
        got_w: usize,
        want_h: usize,
        want_w: usize,
    },

    #[error("sequence has no frames")]
    EmptySequence,

    #[error("sequence of {frames} frames is shorter than clip length {clip_length}")]
    SequenceTooShort { frames: usize, clip_length: usize },

    #[error("volume {height}x{width}x{frames} is too small (need at least 3 in every axis)")]
    VolumeTooSmall { height: usize, width: usize, frames: usize },

    #[error("only {available} patterns of order {order} pooled, need at least {needed}")]
    InsufficientPatterns {
        order: usize,
        available: usize,
        needed: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("missing features for id {id:?} (kind {kind})")]
    MissingId { id: String, kind: FeatureKind },

    #[error("Gram system is singular; use a positive ridge")]
    SingularSystem,

    #[error("labels contain a single class")]
    DegenerateLabels,

    #[error("missing feature kind {0}")]
    MissingFeatureKind(FeatureKind),

    #[error("fusion weights do not cover the provided feature kinds")]
    WeightMismatch,

    #[error("regressor bank {0} was not trained")]
    UntrainedBank(String),

    #[error("classifier {0} was not trained")]
    UntrainedClassifier(String),

    #[error("class {0} absent from training data")]
    ClassAbsent(String),

    #[error("video is static; coarse mask is empty")]
    AllStaticVideo,

    #[error("could not place {wanted} candidates inside the mask after {attempts} attempts")]
    MaskTooSmall { wanted: usize, attempts: usize },

    #[error("no positive labels")]
    NoPositives,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    #[error("model file check failed: {0}")]
    CorruptModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, reason: impl std::fmt::Display) -> Self {
        Error::Parse {
            location: location.into(),
            reason: reason.to_string(),
        }
    }

    pub(crate) fn unreadable(path: impl Into<PathBuf>, reason: impl std::fmt::Display) -> Self {
        Error::UnreadableFile {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}
