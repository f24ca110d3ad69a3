//! Logistic regression, a feed-forward network and a kernel SVM, trained
//! from scratch with full-batch gradient descent (LR, ANN) or SMO (SVM).
//!
//! All three share the [`Classifier`] interface. Probabilistic models
//! predict phishing when the hypothesis is strictly above 0.5 (a tie is
//! legitimate); the SVM predicts phishing when its decision value is on or
//! above zero.

mod ann;
mod kernel;
mod logistic;
mod persist;
mod svm;

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;

pub use ann::{ann_cost, ann_gradient, AnnGradient, AnnModel, AnnParams, Forward};
pub use kernel::{gram_matrix, KernelKind, KernelSpec};
pub use logistic::{lr_cost, lr_gradient, LogisticModel, LrParams};
pub use persist::{deserialize_model, serialize_model, ModelFile, Preprocessing, MODEL_FORMAT_VERSION};
pub use svm::{SvmModel, SvmParams};

/// Probabilities are clamped to this distance from 0 and 1 inside costs.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassifierError {
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data must contain both classes")]
    SingleClassData,
    #[error("training data is empty")]
    EmptyDataset,
    #[error("loss became non-finite at epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("SMO stopped after {iterations} iterations without meeting tolerance")]
    MaxIterationsExceeded { iterations: usize },
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u64),
    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),
}

pub type Result<T, E = ClassifierError> = std::result::Result<T, E>;

/// Logistic function, stable for large |z|.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Relu, Activation::Tanh, Activation::Sigmoid];

    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => sigmoid(z),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(format!("unknown activation {other:?} (expected relu, tanh or sigmoid)")),
        }
    }
}

pub trait Classifier {
    fn n_features(&self) -> usize;

    /// Probability of phishing for LR/ANN, signed decision value for SVM.
    fn score(&self, x: ArrayView1<'_, f64>) -> Result<f64>;

    fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8>;

    fn predict_dataset(&self, data: &Dataset) -> Result<Vec<u8>> {
        check_dim(self.n_features(), data.n_features())?;
        data.features().rows().into_iter().map(|r| self.predict(r)).collect()
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(ClassifierError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_trainable(data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    if !data.has_both_classes() {
        return Err(ClassifierError::SingleClassData);
    }
    Ok(())
}

pub(crate) fn probability_label(p: f64) -> u8 {
    u8::from(p > 0.5)
}

/// Binary cross-entropy of one prediction with the hypothesis clamped away
/// from 0 and 1.
pub(crate) fn cross_entropy(h: f64, y: f64) -> f64 {
    let h = h.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    -(y * h.ln() + (1.0 - y) * (1.0 - h).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Ann,
    Svm,
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ModelKind::Lr),
            "ann" => Ok(ModelKind::Ann),
            "svm" => Ok(ModelKind::Svm),
            other => Err(format!("unknown model kind {other:?} (expected lr, ann or svm)")),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Lr => "lr",
            ModelKind::Ann => "ann",
            ModelKind::Svm => "svm",
        })
    }
}

/// Any trained model, tagged by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Lr(LogisticModel),
    Ann(AnnModel),
    Svm(SvmModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Lr(_) => ModelKind::Lr,
            Model::Ann(_) => ModelKind::Ann,
            Model::Svm(_) => ModelKind::Svm,
        }
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            Model::Lr(m) => m,
            Model::Ann(m) => m,
            Model::Svm(m) => m,
        }
    }
}

impl Classifier for Model {
    fn n_features(&self) -> usize {
        self.inner().n_features()
    }

    fn score(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.inner().score(x)
    }

    fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        self.inner().predict(x)
    }
}

impl From<LogisticModel> for Model {
    fn from(m: LogisticModel) -> Self {
        Model::Lr(m)
    }
}

impl From<AnnModel> for Model {
    fn from(m: AnnModel) -> Self {
        Model::Ann(m)
    }
}

impl From<SvmModel> for Model {
    fn from(m: SvmModel) -> Self {
        Model::Svm(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(20.0) > 0.5);
        assert!(sigmoid(1000.0) <= 1.0 && sigmoid(1000.0).is_finite());
        assert!(sigmoid(-1000.0) >= 0.0 && sigmoid(-1000.0).is_finite());
        assert!((sigmoid(2.197) - 0.9).abs() < 1e-4);
    }

    #[test]
    fn activation_parse() {
        assert_eq!("ReLU".parse::<Activation>().unwrap(), Activation::Relu);
        assert!("softmax".parse::<Activation>().is_err());
    }

    #[test]
    fn clamped_cross_entropy_is_finite() {
        assert!(cross_entropy(0.0, 1.0).is_finite());
        assert!(cross_entropy(1.0, 0.0).is_finite());
        assert!((cross_entropy(0.5, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
