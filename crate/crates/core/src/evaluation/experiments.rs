use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, ConfusionMatrix, Metrics, PfaDenominator};
use super::preprocessing::Standardizer;
use super::report::format_param;
use super::split::{split_indices, SplitSpec};
use super::{EvalError, Result};
use crate::classifiers::{
    Activation, AnnModel, AnnParams, ClassifierError, KernelKind, KernelSpec, LogisticModel, LrParams, Model, SvmModel,
    SvmParams,
};
use crate::dataset::Dataset;

/// Hidden-layer layouts compared in the architecture grid.
pub const TABLE_ARCHITECTURES: [&[usize]; 2] = [&[100], &[100, 100]];

/// Hidden activations compared in the architecture grid.
pub const TABLE_ACTIVATIONS: [Activation; 3] = Activation::ALL;

/// A train/test split with the standardizer fitted on the training part
/// and applied to both.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSplit {
    pub train: Dataset,
    pub test: Dataset,
    pub standardizer: Standardizer,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

pub fn prepare(data: &Dataset, split: &SplitSpec) -> Result<PreparedSplit> {
    let (train_indices, test_indices) = split_indices(data.labels(), split)?;
    let raw_train = data.select(&train_indices);
    let standardizer = Standardizer::fit(&raw_train)?;
    Ok(PreparedSplit {
        train: standardizer.transform(&raw_train)?,
        test: standardizer.transform(&data.select(&test_indices))?,
        standardizer,
        train_indices,
        test_indices,
    })
}

/// Model family swept over the regularization strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SweepModel {
    Lr(LrParams),
    Ann(AnnParams),
}

impl SweepModel {
    pub fn train_with_lambda(&self, data: &Dataset, lambda: f64) -> Result<Model, ClassifierError> {
        match self {
            SweepModel::Lr(p) => LogisticModel::train(data, &LrParams { lambda, ..*p }).map(Model::from),
            SweepModel::Ann(p) => AnnModel::train(data, &AnnParams { lambda, ..p.clone() }).map(Model::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_values: Vec<f64>,
    pub metrics_per_value: Vec<Metrics>,
    pub confusions: Vec<ConfusionMatrix>,
}

impl SweepResult {
    /// Index of the first value with the highest accuracy.
    pub fn best(&self) -> usize {
        argmax(self.metrics_per_value.iter().map(|m| m.accuracy))
    }

    pub fn rows(&self) -> Vec<(String, Metrics)> {
        self.parameter_values.iter().map(|&v| format_param(v)).zip(self.metrics_per_value.iter().copied()).collect()
    }
}

/// One evaluated configuration of a comparison grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub label: String,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTable {
    pub rows: Vec<GridRow>,
}

impl GridTable {
    /// First row with the highest accuracy.
    pub fn best(&self) -> &GridRow {
        &self.rows[argmax(self.rows.iter().map(|r| r.metrics.accuracy))]
    }

    pub fn metric_rows(&self) -> Vec<(String, Metrics)> {
        self.rows.iter().map(|r| (r.label.clone(), r.metrics)).collect()
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Parses `start:stop:step` (inclusive of `stop`) or a comma-separated
/// list into a strictly increasing grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| EvalError::InvalidGrid(msg);
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(format!("{s:?} is not a number")));
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad(format!("{spec:?} is not start:stop:step")));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step <= 0.0 || stop < start {
            return Err(bad(format!("{spec:?} needs step > 0 and stop >= start")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(bad("grid is empty".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad(format!("{spec:?} is not strictly increasing")));
    }
    Ok(values)
}

fn train_and_score(
    split: &PreparedSplit,
    label: String,
    pfa: PfaDenominator,
    train: impl FnOnce(&Dataset) -> Result<Model, ClassifierError>,
) -> Result<GridRow> {
    let model = train(&split.train).map_err(|source| EvalError::Training { param: label.clone(), source })?;
    let (confusion, metrics) = evaluate(&model, &split.test, pfa)?;
    Ok(GridRow { label, confusion, metrics })
}

/// Trains one model per regularization strength on the same split.
pub fn regularization_sweep(
    split: &PreparedSplit,
    model: &SweepModel,
    grid: &[f64],
    pfa: PfaDenominator,
) -> Result<SweepResult> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvalError::InvalidGrid("grid must be non-empty and strictly increasing".into()));
    }
    let rows: Vec<GridRow> = grid
        .par_iter()
        .map(|&lambda| {
            train_and_score(split, format!("lambda={}", format_param(lambda)), pfa, |d| model.train_with_lambda(d, lambda))
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        parameter_values: grid.to_vec(),
        metrics_per_value: rows.iter().map(|r| r.metrics).collect(),
        confusions: rows.iter().map(|r| r.confusion).collect(),
    })
}

pub fn architecture_label(hidden: &[usize], activation: Activation) -> String {
    let layers: Vec<String> = hidden.iter().map(usize::to_string).collect();
    format!("{}/{}", layers.join("-"), activation.name())
}

/// Every combination of hidden layout and activation, layout-major.
pub fn ann_grid(
    split: &PreparedSplit,
    architectures: &[&[usize]],
    activations: &[Activation],
    base: &AnnParams,
    pfa: PfaDenominator,
) -> Result<GridTable> {
    let cells: Vec<(Vec<usize>, Activation)> = architectures
        .iter()
        .flat_map(|h| activations.iter().map(move |&a| (h.to_vec(), a)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(hidden, activation)| {
            let params = AnnParams { hidden_layers: hidden, activation, ..base.clone() };
            train_and_score(split, architecture_label(&params.hidden_layers, activation), pfa, |d| {
                AnnModel::train(d, &params).map(Model::from)
            })
        })
        .collect::<Result<_>>()?;
    Ok(GridTable { rows })
}

pub fn kernel_label(spec: &KernelSpec) -> String {
    match spec.kind {
        KernelKind::Polynomial if spec.degree == 3 => "cubic".to_string(),
        KernelKind::Polynomial => format!("polynomial-{}", spec.degree),
        kind => kind.name().to_string(),
    }
}

/// Linear, cubic, RBF and sigmoid kernels with default parameters for the
/// split's feature count. `base` supplies C and the tolerance.
pub fn kernel_comparison(split: &PreparedSplit, base: &SvmParams, pfa: PfaDenominator) -> Result<GridTable> {
    let n_features = split.train.n_features();
    let rows = KernelKind::ALL
        .par_iter()
        .map(|&kind| {
            let params = SvmParams { kernel: KernelSpec::with_defaults(kind, n_features), ..*base };
            train_and_score(split, kernel_label(&params.kernel), pfa, |d| SvmModel::train(d, &params).map(Model::from))
        })
        .collect::<Result<_>>()?;
    Ok(GridTable { rows })
}

/// Settings for the three-family comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub ann: AnnParams,
    pub architectures: Vec<Vec<usize>>,
    pub activations: Vec<Activation>,
    pub svm: SvmParams,
    pub lr: LrParams,
    pub lambda_grid: Vec<f64>,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            ann: AnnParams::default(),
            architectures: TABLE_ARCHITECTURES.iter().map(|h| h.to_vec()).collect(),
            activations: TABLE_ACTIVATIONS.to_vec(),
            svm: SvmParams::default(),
            lr: LrParams::default(),
            lambda_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

/// Best row of each family: ANN architecture, SVM kernel, LR strength.
pub fn compare_families(ann: &GridTable, svm: &GridTable, lr: &SweepResult) -> GridTable {
    let a = ann.best();
    let s = svm.best();
    let l = lr.best();
    GridTable {
        rows: vec![
            GridRow { label: format!("ann {}", a.label), ..a.clone() },
            GridRow { label: format!("svm {}", s.label), ..s.clone() },
            GridRow {
                label: format!("lr lambda={}", format_param(lr.parameter_values[l])),
                confusion: lr.confusions[l],
                metrics: lr.metrics_per_value[l],
            },
        ],
    }
}

/// Runs the three family grids and keeps each family's best row.
pub fn model_comparison(split: &PreparedSplit, config: &ComparisonConfig, pfa: PfaDenominator) -> Result<GridTable> {
    let archs: Vec<&[usize]> = config.architectures.iter().map(Vec::as_slice).collect();
    let (ann, (svm, lr)) = rayon::join(
        || ann_grid(split, &archs, &config.activations, &config.ann, pfa),
        || {
            rayon::join(
                || kernel_comparison(split, &config.svm, pfa),
                || regularization_sweep(split, &SweepModel::Lr(config.lr), &config.lambda_grid, pfa),
            )
        },
    );
    Ok(compare_families(&ann?, &svm?, &lr?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert_eq!(parse_grid("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
        assert!(parse_grid("1,0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(architecture_label(&[100, 100], Activation::Relu), "100-100/relu");
        assert_eq!(kernel_label(&KernelSpec::with_defaults(KernelKind::Polynomial, 10)), "cubic");
        assert_eq!(kernel_label(&KernelSpec::with_defaults(KernelKind::Rbf, 10)), "rbf");
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax([0.5, 0.9, 0.9, 0.1].into_iter()), 1);
    }
}
