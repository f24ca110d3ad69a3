//! Versioned JSON model files.
//!
//! Floating-point values are written in scientific notation with 17
//! significant digits, which round-trips every `f64` exactly. Object keys
//! are sorted, so equal models always produce identical bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ClassifierError, Model, Result};
use crate::evaluation::{NominalEncoder, Standardizer};

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Transformations fitted on the training rows, replayed before prediction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Preprocessing {
    pub encoder: Option<NominalEncoder>,
    pub standardizer: Option<Standardizer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u64,
    pub model: Model,
    #[serde(default)]
    pub preprocessing: Preprocessing,
}

impl ModelFile {
    pub fn new(model: impl Into<Model>, preprocessing: Preprocessing) -> Self {
        ModelFile { format_version: MODEL_FORMAT_VERSION, model: model.into(), preprocessing }
    }
}

pub fn serialize_model(file: &ModelFile) -> String {
    let value = serde_json::to_value(file).expect("model types serialize to JSON");
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    out
}

pub fn deserialize_model(text: &str) -> Result<ModelFile> {
    let corrupt = |e: serde_json::Error| ClassifierError::CorruptModelFile(e.to_string());
    let value: Value = serde_json::from_str(text).map_err(corrupt)?;
    let version = value
        .get("format_version")
        .ok_or_else(|| ClassifierError::CorruptModelFile("missing format_version".into()))?
        .as_u64()
        .ok_or_else(|| ClassifierError::CorruptModelFile("format_version is not an integer".into()))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(ClassifierError::UnsupportedVersion(version));
    }
    let file: ModelFile = serde_json::from_value(value).map_err(corrupt)?;
    match &file.model {
        Model::Lr(m) => {
            if m.weights.len() < 2 || m.weights.iter().any(|w| !w.is_finite()) {
                return Err(ClassifierError::CorruptModelFile("invalid logistic weights".into()));
            }
        }
        Model::Ann(m) => m.validate()?,
        Model::Svm(m) => m.validate()?,
    }
    Ok(file)
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => write!(out, "{:.16e}", n.as_f64().expect("finite number")).unwrap(),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                push_indent(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                push_indent(out, indent + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}
