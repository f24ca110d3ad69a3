//! Corpus preparation: exact-duplicate removal, class balancing, synthetic
//! indicator datasets and the CSV/JSON files they are stored in.

mod io;
mod synthetic;

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::email::ParsedEmail;
use crate::features::Label;

pub use io::{
    dataset_from_csv, dataset_to_csv, load_dataset, load_indicator_dataset, load_raw_table, raw_table_from_csv,
    save_dataset, CorpusManifest, DATASET_HEADER,
};
pub use synthetic::{generate_synthetic_corpus, SyntheticSpec, DEFAULT_SYNTHETIC_SPEC};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("row {row}, column {column}: {value:?} is not 0 or 1")]
    NonBinaryFeatureValue { row: usize, column: String, value: String },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("corpus must contain both classes")]
    SingleClassData,
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// SHA-256 of the case-folded, whitespace-collapsed subject and body.
pub fn dedup_key(subject: &str, body: &str) -> [u8; 32] {
    let norm = |s: &str| s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
    let mut h = Sha256::new();
    h.update(norm(subject).as_bytes());
    h.update(b"\n");
    h.update(norm(body).as_bytes());
    h.finalize().into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledEmail {
    pub email: ParsedEmail,
    pub label: Label,
    pub dedup_key: [u8; 32],
}

impl LabeledEmail {
    pub fn new(email: ParsedEmail, label: Label) -> Self {
        let dedup_key = dedup_key(&email.subject, &email.body_text);
        LabeledEmail { email, label, dedup_key }
    }
}

/// Keeps the first record for every key, in input order. Returns the kept
/// records and how many were dropped.
pub fn dedup_by_key<T, K: Eq + std::hash::Hash>(items: Vec<T>, key: impl Fn(&T) -> K) -> (Vec<T>, usize) {
    let mut seen = std::collections::HashSet::new();
    let before = items.len();
    let kept: Vec<T> = items.into_iter().filter(|item| seen.insert(key(item))).collect();
    let removed = before - kept.len();
    (kept, removed)
}

pub fn dedup(corpus: Vec<LabeledEmail>) -> (Vec<LabeledEmail>, usize) {
    dedup_by_key(corpus, |e| e.dedup_key)
}

/// Indices to keep so both classes have the minority count. The majority
/// class is sampled uniformly with the seeded generator; the result is in
/// ascending order.
pub fn balance_indices(labels: &[u8], seed: u64) -> Result<Vec<usize>> {
    let (zeros, ones): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| labels[i] == 0);
    if zeros.is_empty() || ones.is_empty() {
        return Err(CorpusError::SingleClassData);
    }
    let (mut major, minor) = if zeros.len() >= ones.len() { (zeros, ones) } else { (ones, zeros) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    major.shuffle(&mut rng);
    major.truncate(minor.len());
    let mut keep: Vec<usize> = major.into_iter().chain(minor).collect();
    keep.sort_unstable();
    Ok(keep)
}

pub fn balance_classes(corpus: Vec<LabeledEmail>, seed: u64) -> Result<Vec<LabeledEmail>> {
    let labels: Vec<u8> = corpus.iter().map(|e| e.label.as_u8()).collect();
    let keep = balance_indices(&labels, seed)?;
    let mut keep = keep.into_iter().peekable();
    Ok(corpus
        .into_iter()
        .enumerate()
        .filter_map(|(i, e)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(e)
            } else {
                None
            }
        })
        .collect())
}

pub fn balance_dataset(data: &Dataset, seed: u64) -> Result<Dataset> {
    Ok(data.select(&balance_indices(data.labels(), seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_normalization() {
        assert_eq!(dedup_key("Hello  World", "Body\n text"), dedup_key("hello world", "body text"));
        assert_ne!(dedup_key("a", "b"), dedup_key("a", "c"));
        assert_ne!(dedup_key("a b", ""), dedup_key("a", "b"));
    }

    #[test]
    fn dedup_keeps_first() {
        let (kept, removed) = dedup_by_key(vec![(1, 'a'), (2, 'b'), (1, 'c')], |p| p.0);
        assert_eq!(kept, vec![(1, 'a'), (2, 'b')]);
        assert_eq!(removed, 1);
    }

    #[test]
    fn balance_downsamples_majority() {
        let labels: Vec<u8> = (0..5000).map(|i| u8::from(i < 2000)).collect();
        let keep = balance_indices(&labels, 3).unwrap();
        assert_eq!(keep.len(), 4000);
        assert_eq!(keep.iter().filter(|&&i| labels[i] == 1).count(), 2000);
        assert!(keep.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(balance_indices(&labels, 3).unwrap(), keep);
        let even: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        assert_eq!(balance_indices(&even, 0).unwrap(), (0..10).collect::<Vec<_>>());
        assert!(matches!(balance_indices(&[1, 1], 0), Err(CorpusError::SingleClassData)));
    }
}
