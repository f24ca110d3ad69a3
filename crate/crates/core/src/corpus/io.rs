use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};
use crate::dataset::Dataset;
use crate::evaluation::RawTable;
use crate::features::FEATURE_COUNT;

pub const DATASET_HEADER: [&str; FEATURE_COUNT + 1] = ["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "label"];

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.into(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CorpusError::Io { path: path.into(), source })
}

/// Dataset as CSV. Values use the shortest decimal form that parses back
/// to the same `f64`.
pub fn dataset_to_csv(data: &Dataset) -> Result<String> {
    if data.n_features() != FEATURE_COUNT {
        return Err(CorpusError::SchemaMismatch(format!(
            "dataset has {} feature columns, the file format holds {FEATURE_COUNT}",
            data.n_features()
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DATASET_HEADER).expect("in-memory write");
    for (row, label) in data.features().rows().into_iter().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        rec.push(label.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output"))
}

pub fn save_dataset(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    write(path.as_ref(), &dataset_to_csv(data)?)
}

/// Parses the CSV into string cells, checking the header, row widths and
/// labels but not the feature values.
pub fn raw_table_from_csv(text: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CorpusError::SchemaMismatch(e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != DATASET_HEADER {
        return Err(CorpusError::SchemaMismatch(format!(
            "header is {:?}, expected {}",
            names.join(","),
            DATASET_HEADER.join(",")
        )));
    }
    let mut table = RawTable {
        header: DATASET_HEADER[..FEATURE_COUNT].iter().map(|s| s.to_string()).collect(),
        ..RawTable::default()
    };
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CorpusError::SchemaMismatch(format!("row {}: {e}", i + 1)))?;
        let label = match rec[FEATURE_COUNT].trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(CorpusError::SchemaMismatch(format!("row {}: label {other:?} is not 0 or 1", i + 1))),
        };
        table.rows.push(rec.iter().take(FEATURE_COUNT).map(|s| s.trim().to_string()).collect());
        table.labels.push(label);
    }
    Ok(table)
}

pub fn load_raw_table(path: impl AsRef<Path>) -> Result<RawTable> {
    raw_table_from_csv(&read(path.as_ref())?)
}

/// Parses a CSV of numeric feature values.
pub fn dataset_from_csv(text: &str) -> Result<Dataset> {
    let table = raw_table_from_csv(text)?;
    let mut flat = Vec::with_capacity(table.rows.len() * FEATURE_COUNT);
    for (i, row) in table.rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                CorpusError::SchemaMismatch(format!("row {}, column {}: {cell:?} is not a number", i + 1, DATASET_HEADER[j]))
            })?;
            flat.push(v);
        }
    }
    let x = Array2::from_shape_vec((table.rows.len(), FEATURE_COUNT), flat).expect("row widths checked");
    Dataset::new(x, table.labels).map_err(|e| CorpusError::SchemaMismatch(e.to_string()))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    dataset_from_csv(&read(path.as_ref())?)
}

/// Loads a file of raw indicators, rejecting any value other than 0 or 1.
pub fn load_indicator_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let text = read(path.as_ref())?;
    let table = raw_table_from_csv(&text)?;
    for (i, row) in table.rows.iter().enumerate() {
        if let Some(j) = row.iter().position(|c| c != "0" && c != "1") {
            return Err(CorpusError::NonBinaryFeatureValue {
                row: i + 1,
                column: DATASET_HEADER[j].to_string(),
                value: row[j].clone(),
            });
        }
    }
    dataset_from_csv(&text)
}

/// JSON sidecar describing where a stored corpus came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub legitimate: usize,
    pub phishing: usize,
    pub sources: Vec<String>,
    pub dedup_kept: usize,
    pub dedup_removed: usize,
    pub seed: u64,
}

impl CorpusManifest {
    pub fn for_dataset(data: &Dataset, sources: Vec<String>, dedup_removed: usize, seed: u64) -> Self {
        let (legitimate, phishing) = data.class_counts();
        CorpusManifest { legitimate, phishing, sources, dedup_kept: data.len(), dedup_removed, seed }
    }

    /// True when the class counts agree with `data`.
    pub fn matches(&self, data: &Dataset) -> bool {
        data.class_counts() == (self.legitimate, self.phishing)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write(path.as_ref(), &self.to_json())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        serde_json::from_str(&read(path.as_ref())?).map_err(|e| CorpusError::SchemaMismatch(e.to_string()))
    }
}
