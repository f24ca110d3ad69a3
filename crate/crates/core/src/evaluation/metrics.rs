use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvalError, Result};
use crate::classifiers::Classifier;
use crate::dataset::Dataset;

/// Confusion counts with phishing as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }
}

/// Denominator used for the false-alarm probability.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PfaDenominator {
    /// `fp / (fp + tn)`, the false-positive rate.
    #[default]
    Standard,
    /// `fp / (tp + fn)`, false alarms over the number of phishing emails.
    Paper,
}

impl FromStr for PfaDenominator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(PfaDenominator::Standard),
            "paper" => Ok(PfaDenominator::Paper),
            other => Err(format!("unknown p_fa denominator {other:?} (expected standard or paper)")),
        }
    }
}

impl fmt::Display for PfaDenominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PfaDenominator::Standard => "standard",
            PfaDenominator::Paper => "paper",
        })
    }
}

/// Detection, false-alarm and miss-detection probabilities plus accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub p_d: f64,
    pub p_fa: f64,
    pub p_md: f64,
    pub accuracy: f64,
}

pub fn confusion(predictions: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(EvalError::LengthMismatch { predictions: predictions.len(), labels: labels.len() });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p, y) {
            (1, 1) => cm.tp += 1,
            (1, 0) => cm.fp += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fn_ += 1,
            _ => return Err(EvalError::InvalidLabel(p.max(y))),
        }
    }
    Ok(cm)
}

/// `a / (a + b)` and `b / (a + b)` with a sum of exactly 1.
///
/// The larger share is divided out; the smaller one is `1 - larger`, which
/// is exact for any value in `[0.5, 1]`.
fn complementary(a: u64, b: u64) -> (f64, f64) {
    let total = (a + b) as f64;
    if a >= b {
        let pa = a as f64 / total;
        (pa, 1.0 - pa)
    } else {
        let pb = b as f64 / total;
        (1.0 - pb, pb)
    }
}

pub fn compute_metrics(cm: &ConfusionMatrix, pfa: PfaDenominator) -> Result<Metrics> {
    if cm.positives() == 0 || cm.negatives() == 0 {
        return Err(EvalError::DegenerateTestSet { positives: cm.positives(), negatives: cm.negatives() });
    }
    let (p_d, p_md) = complementary(cm.tp, cm.fn_);
    let p_fa = match pfa {
        PfaDenominator::Standard => cm.fp as f64 / cm.negatives() as f64,
        PfaDenominator::Paper => cm.fp as f64 / cm.positives() as f64,
    };
    let accuracy = (cm.tp + cm.tn) as f64 / cm.total() as f64;
    Ok(Metrics { p_d, p_fa, p_md, accuracy })
}

/// Predicts every test row and scores the predictions.
pub fn evaluate(model: &dyn Classifier, test: &Dataset, pfa: PfaDenominator) -> Result<(ConfusionMatrix, Metrics)> {
    let predictions = model.predict_dataset(test)?;
    let cm = confusion(&predictions, test.labels())?;
    Ok((cm, compute_metrics(&cm, pfa)?))
}
