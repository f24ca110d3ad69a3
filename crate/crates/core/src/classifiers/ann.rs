use std::collections::HashMap;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_dim, check_trainable, cross_entropy, probability_label, sigmoid, Activation, Classifier, ClassifierError, Result};
use crate::dataset::Dataset;

/// Half-width of the uniform weight initialization interval.
pub const INIT_RANGE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnParams {
    pub hidden_layers: Vec<usize>,
    pub activation: Activation,
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for AnnParams {
    fn default() -> Self {
        AnnParams {
            hidden_layers: vec![100, 100],
            activation: Activation::Relu,
            lambda: 0.0,
            learning_rate: 0.01,
            epochs: 2000,
            seed: 0,
        }
    }
}

impl AnnParams {
    fn validate(&self) -> Result<()> {
        if self.hidden_layers.contains(&0) {
            return Err(ClassifierError::InvalidHyperparameter("hidden layer sizes must be >= 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter(format!("lambda {} must be >= 0", self.lambda)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter(format!(
                "learning rate {} must be > 0",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(ClassifierError::InvalidHyperparameter("epochs must be > 0".into()));
        }
        Ok(())
    }
}

/// Fully connected network with one sigmoid output unit.
///
/// `weights[l]` maps layer `l` to layer `l + 1` and has shape
/// `(layer_sizes[l + 1], layer_sizes[l])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnModel {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub rng_seed: u64,
    #[serde(skip)]
    pub cost_history: Vec<f64>,
}

/// Per-layer activations of a single input, input layer first.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub activations: Vec<Array1<f64>>,
    pub output: f64,
}

/// Gradient of the cost with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnGradient {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

struct BatchForward {
    pre: Vec<Array2<f64>>,
    act: Vec<Array2<f64>>,
}

impl AnnModel {
    /// Network of the given shape with every parameter zero.
    pub fn zeros(layer_sizes: &[usize], activation: Activation) -> Self {
        let weights = layer_sizes.windows(2).map(|w| Array2::zeros((w[1], w[0]))).collect();
        let biases = layer_sizes[1..].iter().map(|&s| Array1::zeros(s)).collect();
        let p = AnnParams::default();
        AnnModel {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            weights,
            biases,
            lambda: p.lambda,
            learning_rate: p.learning_rate,
            epochs: p.epochs,
            rng_seed: p.seed,
            cost_history: Vec::new(),
        }
    }

    /// Untrained network for `n_features` inputs: weights uniform in
    /// `[-INIT_RANGE, INIT_RANGE]` drawn layer by layer in row-major order,
    /// biases zero.
    pub fn initialize(n_features: usize, params: &AnnParams) -> Self {
        let mut sizes = Vec::with_capacity(params.hidden_layers.len() + 2);
        sizes.push(n_features);
        sizes.extend_from_slice(&params.hidden_layers);
        sizes.push(1);
        let mut model = AnnModel::zeros(&sizes, params.activation);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let dist = Uniform::new_inclusive(-INIT_RANGE, INIT_RANGE);
        for w in &mut model.weights {
            w.iter_mut().for_each(|v| *v = dist.sample(&mut rng));
        }
        model.lambda = params.lambda;
        model.learning_rate = params.learning_rate;
        model.epochs = params.epochs;
        model.rng_seed = params.seed;
        model
    }

    /// Full-batch gradient descent on the regularized cross-entropy.
    pub fn train(data: &Dataset, params: &AnnParams) -> Result<Self> {
        params.validate()?;
        check_trainable(data)?;
        let mut model = AnnModel::initialize(data.n_features(), params);
        let batch = Batch::compressed(data);
        let mut history = Vec::with_capacity(params.epochs);
        for epoch in 0..params.epochs {
            let (cost, grad) = model.cost_and_gradient(&batch);
            if !cost.is_finite() {
                return Err(ClassifierError::NonFiniteLoss { epoch });
            }
            history.push(cost);
            model.step(&grad, params.learning_rate);
        }
        if !model.parameters_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch: params.epochs });
        }
        model.cost_history = history;
        Ok(model)
    }

    /// Checks that every weight matrix and bias vector fits `layer_sizes`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ClassifierError::CorruptModelFile(msg));
        if self.layer_sizes.len() < 2 || self.layer_sizes.contains(&0) {
            return bad(format!("invalid layer sizes {:?}", self.layer_sizes));
        }
        if *self.layer_sizes.last().unwrap() != 1 {
            return bad("output layer must have exactly one unit".into());
        }
        let n = self.layer_sizes.len() - 1;
        if self.weights.len() != n || self.biases.len() != n {
            return bad("parameter count does not match layer count".into());
        }
        for l in 0..n {
            if self.weights[l].dim() != (self.layer_sizes[l + 1], self.layer_sizes[l]) {
                return bad(format!("weight matrix {l} has shape {:?}", self.weights[l].dim()));
            }
            if self.biases[l].len() != self.layer_sizes[l + 1] {
                return bad(format!("bias vector {l} has length {}", self.biases[l].len()));
            }
        }
        if !self.parameters_finite() {
            return bad("non-finite parameter".into());
        }
        Ok(())
    }

    fn parameters_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    pub fn forward(&self, x: ArrayView1<'_, f64>) -> Result<Forward> {
        check_dim(self.n_features(), x.len())?;
        let mut activations = Vec::with_capacity(self.layer_sizes.len());
        activations.push(x.to_owned());
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = w.dot(activations.last().unwrap()) + b;
            let a = if l == last { z.mapv(sigmoid) } else { z.mapv(|v| self.activation.apply(v)) };
            activations.push(a);
        }
        let output = activations.last().unwrap()[0];
        Ok(Forward { activations, output })
    }

    pub fn hypothesis(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.forward(x).map(|f| f.output)
    }

    fn forward_batch(&self, x: ArrayView2<'_, f64>) -> BatchForward {
        let mut pre = Vec::with_capacity(self.weights.len());
        let mut act = Vec::with_capacity(self.weights.len() + 1);
        act.push(x.to_owned());
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = act[l].dot(&w.t()) + b;
            let a = if l == last { z.mapv(sigmoid) } else { z.mapv(|v| self.activation.apply(v)) };
            pre.push(z);
            act.push(a);
        }
        BatchForward { pre, act }
    }

    fn penalty(&self) -> f64 {
        self.weights.iter().map(|w| w.iter().map(|v| v * v).sum::<f64>()).sum()
    }

    fn cost_from_output(&self, h: ArrayView1<'_, f64>, batch: &Batch) -> f64 {
        let data: f64 = h
            .iter()
            .zip(batch.y.iter().zip(&batch.w))
            .map(|(&h, (&y, &w))| w * cross_entropy(h, y))
            .sum::<f64>()
            / batch.m;
        data + self.lambda / (2.0 * batch.m) * self.penalty()
    }

    fn cost_and_gradient(&self, batch: &Batch) -> (f64, AnnGradient) {
        let m = batch.m;
        let fwd = self.forward_batch(batch.x.view());
        let out = fwd.act.last().unwrap().column(0);
        let cost = self.cost_from_output(out, batch);

        let n = self.weights.len();
        let mut grad_w = Vec::with_capacity(n);
        let mut grad_b = Vec::with_capacity(n);
        let scale = (&batch.w / m).insert_axis(Axis(1));
        let mut delta: Array2<f64> = (fwd.act[n].clone() - batch.y.view().insert_axis(Axis(1))) * &scale;
        for l in (0..n).rev() {
            let gw = delta.t().dot(&fwd.act[l]) + &(&self.weights[l] * (self.lambda / m));
            grad_w.push(gw);
            grad_b.push(delta.sum_axis(Axis(0)));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l]);
                let act = self.activation;
                Zip::from(&mut back)
                    .and(&fwd.pre[l - 1])
                    .and(&fwd.act[l])
                    .for_each(|d, &z, &a| *d *= act.derivative(z, a));
                delta = back;
            }
        }
        grad_w.reverse();
        grad_b.reverse();
        (cost, AnnGradient { weights: grad_w, biases: grad_b })
    }

    fn step(&mut self, grad: &AnnGradient, lr: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grad.weights) {
            w.scaled_add(-lr, g);
        }
        for (b, g) in self.biases.iter_mut().zip(&grad.biases) {
            b.scaled_add(-lr, g);
        }
    }
}

/// Training rows with per-row multiplicities. `m` is the total row count
/// the cost is averaged over.
struct Batch {
    x: Array2<f64>,
    y: Array1<f64>,
    w: Array1<f64>,
    m: f64,
}

impl Batch {
    fn full(data: &Dataset) -> Batch {
        Batch {
            x: data.features().clone(),
            y: data.labels().iter().map(|&l| f64::from(l)).collect(),
            w: Array1::ones(data.len()),
            m: data.len() as f64,
        }
    }

    /// Merges identical (row, label) pairs into one weighted row, in order
    /// of first appearance. The weighted cost equals the per-row cost, but
    /// indicator data has few distinct rows, so each epoch is much cheaper.
    fn compressed(data: &Dataset) -> Batch {
        let mut index: HashMap<(Vec<u64>, u8), usize> = HashMap::new();
        let mut rows = Vec::new();
        let mut counts: Vec<f64> = Vec::new();
        for (row, &label) in data.features().rows().into_iter().zip(data.labels()) {
            let key = (row.iter().map(|v| v.to_bits()).collect(), label);
            match index.get(&key) {
                Some(&u) => counts[u] += 1.0,
                None => {
                    index.insert(key, rows.len());
                    rows.push((row, label));
                    counts.push(1.0);
                }
            }
        }
        let mut x = Array2::zeros((rows.len(), data.n_features()));
        for (i, (row, _)) in rows.iter().enumerate() {
            x.row_mut(i).assign(row);
        }
        Batch {
            x,
            y: rows.iter().map(|&(_, l)| f64::from(l)).collect(),
            w: Array1::from(counts),
            m: data.len() as f64,
        }
    }
}

/// Regularized cross-entropy of `model` on `data`, bias terms unpenalized.
pub fn ann_cost(model: &AnnModel, data: &Dataset) -> Result<f64> {
    check_dim(model.n_features(), data.n_features())?;
    let batch = Batch::full(data);
    let fwd = model.forward_batch(batch.x.view());
    Ok(model.cost_from_output(fwd.act.last().unwrap().column(0), &batch))
}

/// Backpropagated gradient of [`ann_cost`].
pub fn ann_gradient(model: &AnnModel, data: &Dataset) -> Result<AnnGradient> {
    check_dim(model.n_features(), data.n_features())?;
    Ok(model.cost_and_gradient(&Batch::full(data)).1)
}

impl Classifier for AnnModel {
    fn n_features(&self) -> usize {
        self.layer_sizes[0]
    }

    fn score(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.hypothesis(x)
    }

    fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        self.hypothesis(x).map(probability_label)
    }
}
