#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ndarray::Array2;
use phishkit::classifiers::{ann_cost, ann_gradient, lr_cost, lr_gradient, Activation, AnnModel, AnnParams};
use phishkit::Dataset;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn phishkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phishkit"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("phishkit binary runs")
}

/// Continuous random features with both labels present.
pub fn random_dataset(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Dataset {
    let x = Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-2.0..2.0));
    let mut labels: Vec<u8> = (0..rows).map(|_| rng.gen_range(0..=1)).collect();
    labels[0] = 0;
    labels[1] = 1;
    Dataset::new(x, labels).unwrap()
}

/// Padded XOR: two informative columns and eight zero columns.
pub fn padded_xor() -> Dataset {
    let mut rows = Vec::new();
    for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
        let mut r = vec![0.0; 10];
        r[0] = a;
        r[1] = b;
        rows.push(r);
    }
    Dataset::from_rows(&rows, vec![0, 1, 1, 0]).unwrap()
}

/// `|a - n| / max(|a|, |n|, floor)` maximized over components.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(floor))
        .fold(0.0, f64::max)
}

pub fn lr_fd_check(weights: &[f64], data: &Dataset, lambda: f64) -> f64 {
    let analytic = lr_gradient(weights, data, lambda);
    let numeric: Vec<f64> = (0..weights.len())
        .map(|k| {
            let mut plus = weights.to_vec();
            let mut minus = weights.to_vec();
            plus[k] += FD_STEP;
            minus[k] -= FD_STEP;
            (lr_cost(&plus, data, lambda) - lr_cost(&minus, data, lambda)) / (2.0 * FD_STEP)
        })
        .collect();
    max_relative_error(&analytic, &numeric, 1e-6)
}

pub fn ann_fd_check(model: &AnnModel, data: &Dataset) -> f64 {
    let grad = ann_gradient(model, data).unwrap();
    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    let central = |m: &AnnModel, edit: &dyn Fn(&mut AnnModel, f64)| {
        let mut plus = m.clone();
        let mut minus = m.clone();
        edit(&mut plus, FD_STEP);
        edit(&mut minus, -FD_STEP);
        (ann_cost(&plus, data).unwrap() - ann_cost(&minus, data).unwrap()) / (2.0 * FD_STEP)
    };
    for l in 0..model.weights.len() {
        for ((i, j), &g) in grad.weights[l].indexed_iter() {
            analytic.push(g);
            numeric.push(central(model, &|m, h| m.weights[l][[i, j]] += h));
        }
        for (i, &g) in grad.biases[l].indexed_iter() {
            analytic.push(g);
            numeric.push(central(model, &|m, h| m.biases[l][i] += h));
        }
    }
    max_relative_error(&analytic, &numeric, 1e-6)
}

/// `count` random network/dataset pairs cycling through the hidden
/// activations, each with one or two hidden layers and a nonzero penalty.
pub fn ann_fd_cases(count: usize, seed: u64) -> Vec<(AnnModel, Dataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let activations = [Activation::Relu, Activation::Tanh, Activation::Sigmoid];
    (0..count)
        .map(|c| {
            let n_features = rng.gen_range(2..=6);
            let depth = rng.gen_range(1..=2);
            let hidden: Vec<usize> = (0..depth).map(|_| rng.gen_range(2..=6)).collect();
            let params = AnnParams {
                hidden_layers: hidden,
                activation: activations[c % 3],
                lambda: rng.gen_range(0.0..1.0),
                seed: rng.gen(),
                ..AnnParams::default()
            };
            let mut model = AnnModel::initialize(n_features, &params);
            for b in &mut model.biases {
                b.iter_mut().for_each(|v| *v = rng.gen_range(-0.5..0.5));
            }
            let rows = rng.gen_range(4..=12);
            (model, random_dataset(&mut rng, rows, n_features))
        })
        .collect()
}

/// 40 points in the unit square labeled by a random line, keeping only
/// points at least `margin` away from it.
pub fn separable_set(seed: u64, margin: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (w0, w1) = (angle.cos(), angle.sin());
    let offset = rng.gen_range(-0.3..0.3);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    while rows.len() < 40 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let d = w0 * x[0] + w1 * x[1] + offset;
        if d.abs() < margin {
            continue;
        }
        let label = u8::from(d > 0.0);
        if rows.len() >= 38 && !labels.contains(&(1 - label)) {
            continue;
        }
        rows.push(x);
        labels.push(label);
    }
    Dataset::from_rows(&rows, labels).unwrap()
}
