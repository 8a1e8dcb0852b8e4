use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{LinearModel, ModelMeta};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    d: usize,
    h: Vec<f64>,
    z: Option<Vec<f64>>,
    b: Option<f64>,
    k: usize,
    meta: ModelMeta,
}

pub fn model_to_json(model: &LinearModel) -> Result<String> {
    model.validate()?;
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        d: model.d(),
        h: model.h.clone(),
        z: model.z.clone(),
        b: model.b,
        k: model.k,
        meta: model.meta.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn model_from_json(text: &str) -> Result<LinearModel> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Data("model file has no numeric format_version".into()))?;
    if found != u64::from(MODEL_FORMAT_VERSION) {
        return Err(Error::FormatVersion {
            expected: MODEL_FORMAT_VERSION,
            found: u32::try_from(found).unwrap_or(u32::MAX),
        });
    }
    let file: ModelFile = serde_json::from_value(value)?;
    if file.d != file.h.len() {
        return Err(Error::DimensionMismatch {
            expected: file.d,
            found: file.h.len(),
        });
    }
    let model = LinearModel {
        h: file.h,
        z: file.z,
        b: file.b,
        k: file.k,
        meta: file.meta,
    };
    model.validate()?;
    Ok(model)
}

pub fn save_model(model: &LinearModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(model)? + "\n")?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LinearModel> {
    model_from_json(&std::fs::read_to_string(path)?)
}

/// Result table of an experiment. `rows` are numeric and in canonical order
/// (sorted by the experiment's parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: BTreeMap<String, f64>,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Writes the rows as CSV. Values use the shortest representation that reads
/// back to the same `f64`.
pub fn save_report(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back `(columns, rows)` written by [`save_report`].
pub fn load_report_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Data(format!("report value `{f}` is not numeric")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((columns, rows))
}
