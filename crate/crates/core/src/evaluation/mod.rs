//! Preprocessing, train/test splitting, detection metrics and the
//! experiment grids built on top of them.

mod experiments;
mod metrics;
mod preprocessing;
mod report;
mod split;

use thiserror::Error;

use crate::classifiers::ClassifierError;

pub use experiments::{
    ann_grid, compare_families, kernel_comparison, model_comparison, parse_grid, prepare, regularization_sweep,
    ComparisonConfig, GridRow, GridTable, PreparedSplit, SweepModel, SweepResult, TABLE_ACTIVATIONS,
    TABLE_ARCHITECTURES,
};
pub use metrics::{compute_metrics, confusion, evaluate, ConfusionMatrix, Metrics, PfaDenominator};
pub use preprocessing::{ColumnEncoding, NominalEncoder, RawTable, Standardizer};
pub use report::{format_metric, metrics_csv, text_table, METRICS_CSV_HEADER};
pub use split::{split_dataset, split_indices, SplitSpec};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("column {column:?}: category {value:?} was not seen during fitting")]
    UnknownCategory { column: String, value: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("expected {expected} columns, got {found}")]
    ColumnMismatch { expected: usize, found: usize },
    #[error("class {label} has {count} rows; at least 2 are needed to split")]
    InsufficientData { label: u8, count: usize },
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("{predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(u8),
    #[error("test set lacks a class (phishing rows: {positives}, legitimate rows: {negatives})")]
    DegenerateTestSet { positives: u64, negatives: u64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("training failed at {param}: {source}")]
    Training { param: String, source: ClassifierError },
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;
