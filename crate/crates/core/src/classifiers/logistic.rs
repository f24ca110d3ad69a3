use ndarray::{s, Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{check_dim, check_trainable, cross_entropy, probability_label, sigmoid, Classifier, ClassifierError, Result};
use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrParams {
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams { lambda: 0.0, learning_rate: 0.1, epochs: 2000 }
    }
}

impl LrParams {
    fn validate(&self) -> Result<()> {
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

/// Sigmoid hypothesis over a bias plus one weight per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// `weights[0]` is the bias, `weights[1..]` the feature weights.
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Cost before each update, one entry per epoch.
    #[serde(skip)]
    pub cost_history: Vec<f64>,
}

impl LogisticModel {
    pub fn zeros(n_features: usize) -> Self {
        let p = LrParams::default();
        LogisticModel {
            weights: vec![0.0; n_features + 1],
            lambda: p.lambda,
            learning_rate: p.learning_rate,
            epochs: p.epochs,
            cost_history: Vec::new(),
        }
    }

    pub fn hypothesis(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        check_dim(self.n_features(), x.len())?;
        let z = self.weights[0] + self.weights[1..].iter().zip(x.iter()).map(|(w, v)| w * v).sum::<f64>();
        Ok(sigmoid(z))
    }

    /// Full-batch gradient descent on the L2-regularized cross-entropy.
    /// Weights start at zero; the bias is not penalized.
    pub fn train(data: &Dataset, params: &LrParams) -> Result<Self> {
        params.validate()?;
        check_trainable(data)?;
        let mut weights = vec![0.0; data.n_features() + 1];
        let mut history = Vec::with_capacity(params.epochs);
        for epoch in 0..params.epochs {
            let (cost, grad) = cost_and_gradient(&weights, data, params.lambda);
            if !cost.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(ClassifierError::NonFiniteLoss { epoch });
            }
            history.push(cost);
            for (w, g) in weights.iter_mut().zip(&grad) {
                *w -= params.learning_rate * g;
            }
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(ClassifierError::NonFiniteLoss { epoch: params.epochs });
        }
        Ok(LogisticModel {
            weights,
            lambda: params.lambda,
            learning_rate: params.learning_rate,
            epochs: params.epochs,
            cost_history: history,
        })
    }

    pub fn cost(&self, data: &Dataset) -> Result<f64> {
        check_dim(self.n_features(), data.n_features())?;
        Ok(lr_cost(&self.weights, data, self.lambda))
    }
}

fn linear_scores(weights: &[f64], data: &Dataset) -> Array1<f64> {
    let w = ArrayView1::from(&weights[1..]);
    data.features().dot(&w) + weights[0]
}

/// Regularized cross-entropy of `weights` (bias first) on `data`.
pub fn lr_cost(weights: &[f64], data: &Dataset, lambda: f64) -> f64 {
    let m = data.len() as f64;
    let z = linear_scores(weights, data);
    let data_term: f64 = z
        .iter()
        .zip(data.labels())
        .map(|(&z, &y)| cross_entropy(sigmoid(z), f64::from(y)))
        .sum::<f64>()
        / m;
    let penalty: f64 = weights[1..].iter().map(|w| w * w).sum();
    data_term + lambda / (2.0 * m) * penalty
}

/// Analytic gradient of [`lr_cost`] with respect to every weight.
pub fn lr_gradient(weights: &[f64], data: &Dataset, lambda: f64) -> Vec<f64> {
    cost_and_gradient(weights, data, lambda).1
}

fn cost_and_gradient(weights: &[f64], data: &Dataset, lambda: f64) -> (f64, Vec<f64>) {
    let m = data.len() as f64;
    let z = linear_scores(weights, data);
    let h = z.mapv(sigmoid);
    let y = Array1::from_iter(data.labels().iter().map(|&l| f64::from(l)));
    let cost_data: f64 = h.iter().zip(y.iter()).map(|(&h, &y)| cross_entropy(h, y)).sum::<f64>() / m;
    let penalty: f64 = weights[1..].iter().map(|w| w * w).sum();
    let cost = cost_data + lambda / (2.0 * m) * penalty;

    let err = &h - &y;
    let feature_grad = data.features().t().dot(&err) / m;
    let mut grad = Vec::with_capacity(weights.len());
    grad.push(err.sum() / m);
    grad.extend(
        feature_grad
            .slice(s![..])
            .iter()
            .zip(&weights[1..])
            .map(|(g, w)| g + lambda / m * w),
    );
    (cost, grad)
}

impl Classifier for LogisticModel {
    fn n_features(&self) -> usize {
        self.weights.len() - 1
    }

    fn score(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.hypothesis(x)
    }

    fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        self.hypothesis(x).map(probability_label)
    }
}
