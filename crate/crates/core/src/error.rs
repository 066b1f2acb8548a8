use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: column `{column}` not found in header")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}:{line}: {reason}")]
    MalformedRow { path: PathBuf, line: u64, reason: String },

    #[error("log contains no interactions")]
    EmptyLog,

    #[error("duplicate ordinal {0}")]
    DuplicateOrdinal(u64),

    #[error("negative timestamp {timestamp} at ordinal {ordinal}")]
    NegativeTimestamp { ordinal: u64, timestamp: i64 },

    #[error("invalid column mapping: {0}")]
    InvalidMapping(String),

    #[error("invalid split spec: {0}")]
    InvalidSplitSpec(String),

    #[error("invalid preprocessing spec: {0}")]
    InvalidPreprocessSpec(String),

    #[error("degenerate split: {0} period is empty")]
    DegenerateSplit(&'static str),

    #[error("no user has at least {min_len} interactions; evaluation subsets would be empty")]
    EmptyEvaluation { min_len: usize },

    #[error("invalid range: start {start} is after end {end}")]
    InvalidRange { start: i64, end: i64 },

    #[error("cannot compare a {analysed} report with a {reference} report")]
    TypeMismatch {
        analysed: &'static str,
        reference: &'static str,
    },

    #[error("KS statistic needs two non-empty samples")]
    EmptySample,

    #[error("the {0} target subset is empty")]
    EmptyTargets(&'static str),

    #[error("reference log is empty")]
    EmptyReference,

    #[error("bundles come from different sources: {0}")]
    ProvenanceMismatch(String),

    #[error("compare needs at least two bundles, got {0}")]
    TooFewBundles(usize),

    #[error("unsupported schema version {found:?} (expected {expected})")]
    SchemaVersionMismatch { found: Option<i64>, expected: u32 },

    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

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

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable snake_case identifier for machine consumers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MissingColumn { .. } => "missing_column",
            Error::MalformedRow { .. } => "malformed_row",
            Error::EmptyLog => "empty_log",
            Error::DuplicateOrdinal(_) => "duplicate_ordinal",
            Error::NegativeTimestamp { .. } => "negative_timestamp",
            Error::InvalidMapping(_) => "invalid_mapping",
            Error::InvalidSplitSpec(_) => "invalid_split_spec",
            Error::InvalidPreprocessSpec(_) => "invalid_preprocess_spec",
            Error::DegenerateSplit(_) => "degenerate_split",
            Error::EmptyEvaluation { .. } => "empty_evaluation",
            Error::InvalidRange { .. } => "invalid_range",
            Error::TypeMismatch { .. } => "type_mismatch",
            Error::EmptySample => "empty_sample",
            Error::EmptyTargets(_) => "empty_targets",
            Error::EmptyReference => "empty_reference",
            Error::ProvenanceMismatch(_) => "provenance_mismatch",
            Error::TooFewBundles(_) => "too_few_bundles",
            Error::SchemaVersionMismatch { .. } => "schema_version_mismatch",
            Error::MalformedDocument(_) => "malformed_document",
            Error::InvalidThresholds(_) => "invalid_thresholds",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "malformed_csv",
            Error::Json(_) => "malformed_json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
