use std::collections::{BTreeMap, BTreeSet};

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use super::{EvalError, Result};
use crate::dataset::Dataset;

/// Per-column affine scaling to zero mean and unit population standard
/// deviation, using statistics from the rows it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Constant columns keep their value as the mean and get a standard
    /// deviation of 1, so they scale to exact zeros.
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(EvalError::EmptyDataset);
        }
        let n = train.len() as f64;
        let mut means = Vec::with_capacity(train.n_features());
        let mut stds = Vec::with_capacity(train.n_features());
        for col in train.features().axis_iter(Axis(1)) {
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                means.push(first);
                stds.push(1.0);
                continue;
            }
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            means.push(mean);
            stds.push(var.sqrt());
        }
        Ok(Standardizer { means, stds })
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        self.check(data.n_features())?;
        let mut x = data.features().clone();
        for (mut col, (m, s)) in x.axis_iter_mut(Axis(1)).zip(self.means.iter().zip(&self.stds)) {
            col.mapv_inplace(|v| (v - m) / s);
        }
        Ok(data.with_features(x))
    }

    pub fn transform_row(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        self.check(x.len())?;
        Ok(x.iter().zip(self.means.iter().zip(&self.stds)).map(|(v, (m, s))| (v - m) / s).collect())
    }

    fn check(&self, found: usize) -> Result<()> {
        if found == self.n_features() {
            Ok(())
        } else {
            Err(EvalError::ColumnMismatch { expected: self.n_features(), found })
        }
    }
}

/// Feature table as read from disk, before any numeric conversion.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub labels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "categories", rename_all = "lowercase")]
pub enum ColumnEncoding {
    /// Values parsed as decimal numbers.
    Numeric,
    /// Category name to code, assigned in sorted order from 0.
    Nominal(BTreeMap<String, u32>),
}

/// Maps nominal columns to numeric codes, fitted once and then applied
/// unchanged to every later table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalEncoder {
    pub columns: Vec<String>,
    pub encodings: Vec<ColumnEncoding>,
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl NominalEncoder {
    /// A column is numeric when every value parses as a finite number;
    /// otherwise its distinct values are coded in sorted order, so
    /// `{no, yes}` becomes `{0, 1}`.
    pub fn fit(table: &RawTable) -> Self {
        let width = table.header.len();
        let encodings = (0..width)
            .map(|c| {
                let values = table.rows.iter().map(|r| r[c].trim());
                if values.clone().all(|v| parse_number(v).is_some()) {
                    ColumnEncoding::Numeric
                } else {
                    let distinct: BTreeSet<&str> = values.collect();
                    ColumnEncoding::Nominal(distinct.into_iter().zip(0..).map(|(v, i)| (v.to_string(), i)).collect())
                }
            })
            .collect();
        NominalEncoder { columns: table.header.clone(), encodings }
    }

    /// Encoder that parses every column as a number.
    pub fn numeric(columns: &[&str]) -> Self {
        NominalEncoder {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            encodings: vec![ColumnEncoding::Numeric; columns.len()],
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.encodings.iter().all(|e| *e == ColumnEncoding::Numeric)
    }

    pub fn encode_row<S: AsRef<str>>(&self, row: &[S]) -> Result<Vec<f64>> {
        if row.len() != self.encodings.len() {
            return Err(EvalError::ColumnMismatch { expected: self.encodings.len(), found: row.len() });
        }
        row.iter()
            .zip(&self.encodings)
            .zip(&self.columns)
            .map(|((v, enc), col)| {
                let v = v.as_ref().trim();
                let unknown = || EvalError::UnknownCategory { column: col.clone(), value: v.to_string() };
                match enc {
                    ColumnEncoding::Numeric => parse_number(v).ok_or_else(unknown),
                    ColumnEncoding::Nominal(map) => map.get(v).map(|&c| f64::from(c)).ok_or_else(unknown),
                }
            })
            .collect()
    }

    pub fn encode(&self, table: &RawTable) -> Result<Dataset> {
        let mut flat = Vec::with_capacity(table.rows.len() * self.encodings.len());
        for row in &table.rows {
            flat.extend(self.encode_row(row)?);
        }
        let x = Array2::from_shape_vec((table.rows.len(), self.encodings.len()), flat).expect("row widths checked");
        Dataset::new(x, table.labels.clone()).map_err(|e| match e {
            crate::dataset::DatasetError::InvalidLabel(l) => EvalError::InvalidLabel(l),
            _ => EvalError::ColumnMismatch { expected: self.encodings.len(), found: 0 },
        })
    }
}
