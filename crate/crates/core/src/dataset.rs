use ndarray::{Array2, ArrayView1, Axis};
use thiserror::Error;

use crate::features::{FeatureVector, FEATURE_COUNT};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DatasetError {
    #[error("{rows} feature rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(u8),
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRows { row: usize, found: usize, expected: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("feature vector {0} has no label")]
    Unlabeled(usize),
}

/// Feature matrix (one row per email) with 0/1 labels, 1 = phishing.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<u8>) -> Result<Self, DatasetError> {
        if features.nrows() != labels.len() {
            return Err(DatasetError::LengthMismatch { rows: features.nrows(), labels: labels.len() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(DatasetError::InvalidLabel(bad));
        }
        if let Some(((row, col), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(DatasetError::NonFinite { row, col });
        }
        Ok(Dataset { features, labels })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: Vec<u8>) -> Result<Self, DatasetError> {
        let width = rows.first().map_or(FEATURE_COUNT, |r| r.as_ref().len());
        let mut flat = Vec::with_capacity(rows.len() * width);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != width {
                return Err(DatasetError::RaggedRows { row: i, found: r.len(), expected: width });
            }
            flat.extend_from_slice(r);
        }
        let features = Array2::from_shape_vec((rows.len(), width), flat).expect("shape checked");
        Dataset::new(features, labels)
    }

    /// Builds a dataset from labeled indicator vectors.
    pub fn from_vectors(vectors: &[FeatureVector]) -> Result<Self, DatasetError> {
        let labels = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| v.label.map(|l| l.as_u8()).ok_or(DatasetError::Unlabeled(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let rows: Vec<[f64; FEATURE_COUNT]> = vectors.iter().map(FeatureVector::as_f64).collect();
        Dataset::from_rows(&rows, labels)
    }

    pub fn empty(n_features: usize) -> Self {
        Dataset { features: Array2::zeros((0, n_features)), labels: Vec::new() }
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    /// Rows with the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// (legitimate, phishing) row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let phishing = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - phishing, phishing)
    }

    pub fn has_both_classes(&self) -> bool {
        let (neg, pos) = self.class_counts();
        neg > 0 && pos > 0
    }

    pub(crate) fn with_features(&self, features: Array2<f64>) -> Dataset {
        debug_assert_eq!(features.nrows(), self.labels.len());
        Dataset { features, labels: self.labels.clone() }
    }
}
