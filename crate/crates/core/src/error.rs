use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ROI {roi} contains no pixel centres")]
    EmptyRoi { roi: String },

    #[error("vertex {vertex} of ROI {roi} at ({x}, {y}) lies outside the {width}x{height} raster")]
    OutOfBounds {
        roi: String,
        vertex: usize,
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("channel mean {value} for ROI {roi} is not a finite non-negative intensity")]
    InvalidIntensity { roi: String, value: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    #[error("schema mismatch: expected {expected} columns, got {actual}{detail}")]
    SchemaMismatch {
        expected: usize,
        actual: usize,
        detail: String,
    },

    #[error("invalid feature schema: {0}")]
    InvalidSchema(String),

    #[error("unknown feature category `{0}`")]
    UnknownCategory(String),

    #[error("need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("segment has no rows")]
    EmptySegment,

    #[error("leaf hessian sum plus lambda is not positive ({0})")]
    DegenerateLeaf(f64),

    #[error("training labels contain a single class ({positives} positive, {negatives} negative)")]
    DegenerateLabels { positives: usize, negatives: usize },

    #[error("AUC needs both classes ({positives} positive, {negatives} negative)")]
    SingleClass { positives: usize, negatives: usize },

    #[error("cannot split videos: {0}")]
    InsufficientVideos(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model file version {found_major}.{found_minor} is not readable by this build (major {supported_major})")]
    VersionMismatch {
        found_major: u16,
        found_minor: u16,
        supported_major: u16,
    },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("parse error in {file} at line {line}, column {column}: {message}")]
    ParseError {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("non-finite value in video {video}, frame {frame}, column {column}")]
    NonFiniteValue {
        video: String,
        frame: usize,
        column: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable variant name used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyRoi { .. } => "EmptyRoi",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::InvalidIntensity { .. } => "InvalidIntensity",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SchemaMismatch { .. } => "SchemaMismatch",
            Error::InvalidSchema(_) => "InvalidSchema",
            Error::UnknownCategory(_) => "UnknownCategory",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::EmptySegment => "EmptySegment",
            Error::DegenerateLeaf(_) => "DegenerateLeaf",
            Error::DegenerateLabels { .. } => "DegenerateLabels",
            Error::SingleClass { .. } => "SingleClass",
            Error::InsufficientVideos(_) => "InsufficientVideos",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::CorruptModel(_) => "CorruptModel",
            Error::ParseError { .. } => "ParseError",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
