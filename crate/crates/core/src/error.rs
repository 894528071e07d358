use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mask dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: u32, height: u32 },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (u32, u32), found: (u32, u32) },

    #[error("operation is undefined for an empty mask")]
    EmptyMask,

    #[error("operation requires a non-empty list")]
    EmptyList,

    #[error("invalid RLE: {0}")]
    InvalidRle(String),

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid threshold set: {0}")]
    InvalidThresholds(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("mask `{id}`: RLE invalid: {reason}")]
    SceneRleInvalid { id: String, reason: String },

    #[error("mask `{id}`: dimensions {found:?} do not match image {expected:?}")]
    SceneDimensionMismatch {
        id: String,
        expected: (u32, u32),
        found: (u32, u32),
    },

    #[error("mask `{id}`: duplicate id")]
    DuplicateId { id: String },

    #[error("mask `{id}`: empty candidate mask")]
    EmptyCandidate { id: String },

    #[error("unsupported scene version `{0}`")]
    UnsupportedVersion(String),

    #[error("labelme shape `{label}`: {reason}")]
    InvalidShape { label: String, reason: String },

    #[error("{path}: line {line}: {reason}")]
    MalformedRow { path: PathBuf, line: u64, reason: String },

    #[error("{path}: unsupported image format")]
    UnsupportedImage { path: PathBuf },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}
