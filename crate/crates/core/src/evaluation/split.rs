use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EvalError, Result};
use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train_fraction: 0.7, seed: 0, stratified: true }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        SplitSpec { train_fraction, seed, stratified: true }
    }
}

/// Number of rows out of `n` that go to training, never leaving either
/// side empty.
fn train_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

/// Train and test row indices, each in ascending order.
///
/// With stratification each class is shuffled and cut separately, so the
/// per-class fractions match the requested one to within a row.
pub fn split_indices(labels: &[u8], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(spec.train_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let groups: Vec<(u8, Vec<usize>)> = if spec.stratified {
        (0..=1u8)
            .map(|c| (c, (0..labels.len()).filter(|&i| labels[i] == c).collect()))
            .collect()
    } else {
        vec![(0, (0..labels.len()).collect())]
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut idx) in groups {
        if idx.len() < 2 {
            return Err(EvalError::InsufficientData { label, count: idx.len() });
        }
        idx.shuffle(&mut rng);
        let k = train_count(idx.len(), spec.train_fraction);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_dataset(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(data.labels(), spec)?;
    Ok((data.select(&train), data.select(&test)))
}
