use std::path::Path;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};
use crate::dataset::Dataset;
use crate::features::FEATURE_COUNT;

/// Shipped spec: 2000 rows per class with separations in the range a real
/// labeled corpus tends to show.
pub const DEFAULT_SYNTHETIC_SPEC: &str = include_str!("../../data/default_synthetic_spec.json");

/// Independent per-indicator firing probabilities for each class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_per_class: usize,
    pub legitimate: Vec<f64>,
    pub phishing: Vec<f64>,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec::from_json(DEFAULT_SYNTHETIC_SPEC).expect("shipped spec is valid")
    }
}

impl SyntheticSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SyntheticSpec = serde_json::from_str(text).map_err(|e| CorpusError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.into(), source })?;
        SyntheticSpec::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 {
            return Err(CorpusError::InvalidSpec("n_per_class must be >= 1".into()));
        }
        for (name, probs) in [("legitimate", &self.legitimate), ("phishing", &self.phishing)] {
            if probs.len() != FEATURE_COUNT {
                return Err(CorpusError::InvalidSpec(format!(
                    "{name} needs {FEATURE_COUNT} probabilities, got {}",
                    probs.len()
                )));
            }
            if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(CorpusError::InvalidSpec(format!("{name} probability {p} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// `n_per_class` legitimate rows followed by `n_per_class` phishing rows,
/// each indicator drawn independently from its class probability.
pub fn generate_synthetic_corpus(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_per_class;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut x = Array2::zeros((2 * n, FEATURE_COUNT));
    let mut labels = Vec::with_capacity(2 * n);
    for (label, probs) in [(0u8, &spec.legitimate), (1u8, &spec.phishing)] {
        for _ in 0..n {
            let row = labels.len();
            for (j, &p) in probs.iter().enumerate() {
                x[[row, j]] = if rng.gen_bool(p) { 1.0 } else { 0.0 };
            }
            labels.push(label);
        }
    }
    Ok(Dataset::new(x, labels).expect("generated rows are valid"))
}
