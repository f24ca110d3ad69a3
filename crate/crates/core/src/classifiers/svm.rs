use log::warn;
use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use super::kernel::{gram_matrix, KernelKind, KernelSpec};
use super::{check_dim, check_trainable, Classifier, ClassifierError, Result};
use crate::dataset::Dataset;

/// Multipliers at or below this value are treated as zero when picking
/// support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// Substitute for a non-positive curvature along the working pair.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    pub c: f64,
    pub tol: f64,
    /// Iteration cap; `None` means `max(100_000, 100 * n)`.
    pub max_iter: Option<usize>,
}

impl SvmParams {
    pub fn new(kernel: KernelSpec) -> Self {
        SvmParams { kernel, c: 1.0, tol: 1e-3, max_iter: None }
    }

    fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter(format!("C {} must be > 0", self.c)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter(format!("tolerance {} must be > 0", self.tol)));
        }
        Ok(())
    }
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams::new(KernelSpec::with_defaults(KernelKind::Rbf, crate::features::FEATURE_COUNT))
    }
}

/// Soft-margin kernel SVM in dual form.
///
/// The decision value of `x` is `sum(alpha_i * y_i * k(x_i, x)) + bias`
/// over the support vectors, with `y_i` in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c_penalty: f64,
    pub tol: f64,
    /// One multiplier per training row, each in `[0, c_penalty]`.
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Training rows with a multiplier above [`SUPPORT_THRESHOLD`].
    pub support_vectors: Array2<f64>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coef: Vec<f64>,
    pub support_indices: Vec<usize>,
    /// False when the iteration cap was hit before the optimality gap
    /// dropped below `tol`; the model then holds the best iterate found.
    pub converged: bool,
    pub iterations: usize,
    /// Final maximal violating-pair gap.
    pub kkt_gap: f64,
}

impl SvmModel {
    /// Model without support vectors, whose decision value is `bias`
    /// everywhere.
    pub fn empty(kernel: KernelSpec, n_features: usize, bias: f64) -> Self {
        SvmModel {
            kernel,
            c_penalty: 1.0,
            tol: 1e-3,
            alphas: Vec::new(),
            bias,
            support_vectors: Array2::zeros((0, n_features)),
            dual_coef: Vec::new(),
            support_indices: Vec::new(),
            converged: true,
            iterations: 0,
            kkt_gap: 0.0,
        }
    }

    /// Sequential minimal optimization with second-order working-set
    /// selection over a precomputed kernel matrix.
    pub fn train(data: &Dataset, params: &SvmParams) -> Result<Self> {
        params.validate()?;
        check_trainable(data)?;
        let n = data.len();
        let y: Vec<f64> = data.labels().iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let k = gram_matrix(&params.kernel, data.features().view());
        let c = params.c;
        let max_iter = params.max_iter.unwrap_or_else(|| (100 * n).max(100_000));

        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let mut iterations = 0;
        let mut gap;
        let converged = loop {
            let (pair, g) = select_working_set(&k, &y, &alpha, &grad, c);
            gap = g;
            let Some((i, j)) = pair.filter(|_| gap >= params.tol) else {
                break true;
            };
            if iterations >= max_iter {
                break false;
            }
            iterations += 1;

            let (old_i, old_j) = (alpha[i], alpha[j]);
            update_pair(&k, &y, &mut alpha, &grad, c, i, j);
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            let (ki, kj) = (k.row(i), k.row(j));
            for t in 0..n {
                grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
            }
        };
        if !converged {
            warn!("SMO hit the iteration cap ({max_iter}) with optimality gap {gap:.3e}");
        }

        let bias = -compute_rho(&y, &alpha, &grad, c);
        let support_indices: Vec<usize> = (0..n).filter(|&i| alpha[i] > SUPPORT_THRESHOLD).collect();
        let dual_coef = support_indices.iter().map(|&i| alpha[i] * y[i]).collect();
        Ok(SvmModel {
            kernel: params.kernel,
            c_penalty: c,
            tol: params.tol,
            support_vectors: data.features().select(Axis(0), &support_indices),
            alphas: alpha,
            bias,
            dual_coef,
            support_indices,
            converged,
            iterations,
            kkt_gap: gap,
        })
    }

    pub fn decision(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        check_dim(self.n_features(), x.len())?;
        let sum: f64 = self
            .support_vectors
            .rows()
            .into_iter()
            .zip(&self.dual_coef)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(sv, x))
            .sum();
        Ok(sum + self.bias)
    }

    /// Turns a capped run into [`ClassifierError::MaxIterationsExceeded`]
    /// for callers that refuse unconverged models.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(ClassifierError::MaxIterationsExceeded { iterations: self.iterations })
        }
    }

    pub fn n_support(&self) -> usize {
        self.dual_coef.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ClassifierError::CorruptModelFile(msg.to_string()));
        if self.support_vectors.nrows() != self.dual_coef.len() || self.support_indices.len() != self.dual_coef.len() {
            return bad("support vector count does not match coefficient count");
        }
        if self.kernel.validate().is_err() {
            return bad("invalid kernel parameters");
        }
        let finite = self.bias.is_finite()
            && self.dual_coef.iter().all(|v| v.is_finite())
            && self.support_vectors.iter().all(|v| v.is_finite());
        if !finite {
            return bad("non-finite parameter");
        }
        Ok(())
    }
}

/// Picks the maximal violating index `i` and the partner `j` with the
/// largest guaranteed objective decrease. Returns the pair (if any) and the
/// current optimality gap.
fn select_working_set(k: &Array2<f64>, y: &[f64], alpha: &[f64], grad: &[f64], c: f64) -> (Option<(usize, usize)>, f64) {
    let n = y.len();
    let mut gmax = f64::NEG_INFINITY;
    let mut i_sel = None;
    for t in 0..n {
        let in_up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
        if in_up {
            let v = -y[t] * grad[t];
            if v >= gmax {
                gmax = v;
                i_sel = Some(t);
            }
        }
    }
    let Some(i) = i_sel else {
        return (None, 0.0);
    };

    let mut gmax2 = f64::NEG_INFINITY;
    let mut best = f64::INFINITY;
    let mut j_sel = None;
    for t in 0..n {
        let in_low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
        if !in_low {
            continue;
        }
        let v = y[t] * grad[t];
        gmax2 = gmax2.max(v);
        let diff = gmax + v;
        if diff > 0.0 {
            let mut quad = k[[i, i]] + k[[t, t]] - 2.0 * k[[i, t]];
            if quad <= 0.0 {
                quad = TAU;
            }
            let obj = -(diff * diff) / quad;
            if obj <= best {
                best = obj;
                j_sel = Some(t);
            }
        }
    }
    let gap = gmax + gmax2;
    (j_sel.map(|j| (i, j)), if gap.is_finite() { gap } else { 0.0 })
}

/// Analytic two-variable update, clipped to the box while keeping
/// `y_i * alpha_i + y_j * alpha_j` fixed.
fn update_pair(k: &Array2<f64>, y: &[f64], alpha: &mut [f64], grad: &[f64], c: f64, i: usize, j: usize) {
    let mut quad = k[[i, i]] + k[[j, j]] - 2.0 * k[[i, j]];
    if quad <= 0.0 {
        quad = TAU;
    }
    if y[i] != y[j] {
        let delta = (-grad[i] - grad[j]) / quad;
        let diff = alpha[i] - alpha[j];
        alpha[i] += delta;
        alpha[j] += delta;
        if diff > 0.0 {
            if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = diff;
            }
        } else if alpha[i] < 0.0 {
            alpha[i] = 0.0;
            alpha[j] = -diff;
        }
        if diff > 0.0 {
            if alpha[i] > c {
                alpha[i] = c;
                alpha[j] = c - diff;
            }
        } else if alpha[j] > c {
            alpha[j] = c;
            alpha[i] = c + diff;
        }
    } else {
        let delta = (grad[i] - grad[j]) / quad;
        let sum = alpha[i] + alpha[j];
        alpha[i] -= delta;
        alpha[j] += delta;
        if sum > c {
            if alpha[i] > c {
                alpha[i] = c;
                alpha[j] = sum - c;
            }
        } else if alpha[j] < 0.0 {
            alpha[j] = 0.0;
            alpha[i] = sum;
        }
        if sum > c {
            if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = sum - c;
            }
        } else if alpha[i] < 0.0 {
            alpha[i] = 0.0;
            alpha[j] = sum;
        }
    }
}

/// Offset from the free multipliers, or the midpoint of the feasible
/// interval when every multiplier sits on a bound.
fn compute_rho(y: &[f64], alpha: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

impl Classifier for SvmModel {
    fn n_features(&self) -> usize {
        self.support_vectors.ncols()
    }

    fn score(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.decision(x)
    }

    fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        self.decision(x).map(|d| u8::from(d >= 0.0))
    }
}
