use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_dim, ClassifierError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    #[serde(alias = "poly")]
    Polynomial,
    Rbf,
    Sigmoid,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [KernelKind::Linear, KernelKind::Polynomial, KernelKind::Rbf, KernelKind::Sigmoid];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Rbf => "rbf",
            KernelKind::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(KernelKind::Linear),
            "poly" | "polynomial" | "cubic" => Ok(KernelKind::Polynomial),
            "rbf" | "gaussian" => Ok(KernelKind::Rbf),
            "sigmoid" => Ok(KernelKind::Sigmoid),
            other => Err(format!("unknown kernel {other:?} (expected linear, poly, rbf or sigmoid)")),
        }
    }
}

/// Kernel function with its parameters. `degree` is used by the polynomial
/// kernel only, `coef0` by the polynomial and sigmoid kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
}

impl KernelSpec {
    /// Defaults for `n_features` inputs: gamma = 1/n_features, cubic
    /// polynomial with offset 1, sigmoid with offset 0.
    pub fn with_defaults(kind: KernelKind, n_features: usize) -> Self {
        let coef0 = match kind {
            KernelKind::Polynomial => 1.0,
            _ => 0.0,
        };
        KernelSpec { kind, degree: 3, gamma: 1.0 / n_features.max(1) as f64, coef0 }
    }

    pub fn linear() -> Self {
        KernelSpec { kind: KernelKind::Linear, degree: 1, gamma: 1.0, coef0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(ClassifierError::InvalidHyperparameter("kernel degree must be >= 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter(format!("kernel gamma {} must be > 0", self.gamma)));
        }
        if !self.coef0.is_finite() {
            return Err(ClassifierError::InvalidHyperparameter("kernel coef0 must be finite".into()));
        }
        Ok(())
    }

    pub fn eval(&self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> Result<f64> {
        check_dim(a.len(), b.len())?;
        Ok(self.eval_unchecked(a, b))
    }

    pub(crate) fn eval_unchecked(&self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match self.kind {
            KernelKind::Linear => a.dot(&b),
            KernelKind::Polynomial => (self.gamma * a.dot(&b) + self.coef0).powi(self.degree as i32),
            KernelKind::Rbf => {
                let sq: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma * sq).exp()
            }
            KernelKind::Sigmoid => (self.gamma * a.dot(&b) + self.coef0).tanh(),
        }
    }
}

/// Kernel matrix `K[i][j] = k(x_i, x_j)` over the rows of `x`.
pub fn gram_matrix(spec: &KernelSpec, x: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = x.nrows();
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = spec.eval_unchecked(x.row(i), x.row(j));
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    k
}
