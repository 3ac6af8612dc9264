//! Corpus statistics, classification metrics and the combined run report.

mod metrics;
mod report;
mod stats;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use metrics::{
    classification_metrics, load_predictions, Averaging, ClassScores, DegenerateFlag,
    MetricsReport,
};
pub use report::{emit_report, Report, SCHEMA_VERSION};
pub use stats::{label_distribution, load_counts_file, token_stats, TokenCounter, TokenStats};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("token limit must be at least 1")]
    InvalidLimit,
    #[error("no external token count for record {0}")]
    MissingCount(usize),
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("{predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no predictions to score")]
    EmptyInput,
    #[error("entry {position} is not a 0/1 label")]
    InvalidLabel { position: usize },
    #[error("a report needs at least one section")]
    NoSections,
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl AnalyticsError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        AnalyticsError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

impl PartialEq for AnalyticsError {
    fn eq(&self, other: &Self) -> bool {
        use AnalyticsError::*;
        match (self, other) {
            (InvalidLimit, InvalidLimit) | (EmptyInput, EmptyInput) | (NoSections, NoSections) => true,
            (MissingCount(a), MissingCount(b)) | (DuplicateIndex(a), DuplicateIndex(b)) => a == b,
            (
                LengthMismatch { predictions: a, labels: b },
                LengthMismatch { predictions: c, labels: d },
            ) => a == c && b == d,
            (InvalidLabel { position: a }, InvalidLabel { position: b }) => a == b,
            (BadLine { line: a, message: m }, BadLine { line: b, message: n }) => a == b && m == n,
            (Io { path: a, source: e }, Io { path: b, source: f }) => a == b && e.kind() == f.kind(),
            _ => false,
        }
    }
}
