//! CSV and JSON serialisation of sweep results.
//!
//! CSV: one header row (axis names, `case` when present, metric names), then
//! one row per sweep point. JSON: `{"meta": {...}, "columns": [...], "rows":
//! [[...], ...]}`. Floats are written as the shortest decimal that reads back
//! to the same value; non-finite values become the strings `inf`, `-inf`,
//! `NaN`.

use std::io::Write;
use std::path::Path;

use oam_core::experiments::{ResultMeta, ResultRow, ResultSet};
use oam_core::scenario::Case;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed result file: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn columns(rs: &ResultSet) -> Vec<String> {
    let mut cols = rs.axis_names.clone();
    if rs.has_case {
        cols.push("case".into());
    }
    cols.extend(rs.metric_names.iter().cloned());
    cols
}

pub fn to_csv(rs: &ResultSet) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns(rs)).expect("in-memory write");
    for row in &rs.rows {
        let mut record: Vec<String> = row.axes.iter().map(|&v| format_float(v)).collect();
        if let Some(case) = row.case {
            record.push(case.label().into());
        }
        record.extend(row.values.iter().map(|&v| format_float(v)));
        w.write_record(record).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    meta: ResultMeta,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::String(format_float(v))
    }
}

fn read_number(v: &Value) -> Result<f64, OutputError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| OutputError::Malformed(format!("bad number {n}"))),
        Value::String(s) => match s.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "NaN" => Ok(f64::NAN),
            _ => Err(OutputError::Malformed(format!("unexpected string `{s}`"))),
        },
        other => Err(OutputError::Malformed(format!("unexpected value {other}"))),
    }
}

pub fn to_json(rs: &ResultSet) -> Vec<u8> {
    let rows = rs
        .rows
        .iter()
        .map(|row| {
            let mut out: Vec<Value> = row.axes.iter().map(|&v| json_number(v)).collect();
            if let Some(case) = row.case {
                out.push(Value::String(case.label().into()));
            }
            out.extend(row.values.iter().map(|&v| json_number(v)));
            out
        })
        .collect();
    let doc = JsonDoc {
        meta: rs.meta.clone(),
        columns: columns(rs),
        rows,
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("result sets serialise");
    bytes.push(b'\n');
    bytes
}

/// Inverse of [`to_json`].
pub fn from_json(bytes: &[u8]) -> Result<ResultSet, OutputError> {
    let doc: JsonDoc = serde_json::from_slice(bytes).map_err(|e| OutputError::Malformed(e.to_string()))?;
    let Some(axis_count) = doc.columns.iter().position(|c| c == "case") else {
        return split_without_case(doc);
    };
    let metric_start = axis_count + 1;
    let rows = doc
        .rows
        .iter()
        .map(|r| {
            if r.len() != doc.columns.len() {
                return Err(OutputError::Malformed("row length differs from header".into()));
            }
            let case = match &r[axis_count] {
                Value::String(s) => Case::from_label(s).map_err(|e| OutputError::Malformed(e.to_string()))?,
                other => return Err(OutputError::Malformed(format!("bad case {other}"))),
            };
            Ok(ResultRow {
                axes: r[..axis_count].iter().map(read_number).collect::<Result<_, _>>()?,
                case: Some(case),
                values: r[metric_start..].iter().map(read_number).collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResultSet {
        meta: doc.meta,
        axis_names: doc.columns[..axis_count].to_vec(),
        has_case: true,
        metric_names: doc.columns[metric_start..].to_vec(),
        rows,
    })
}

/// Without a case column the axis/metric boundary is recovered from the known
/// metric ids.
fn split_without_case(doc: JsonDoc) -> Result<ResultSet, OutputError> {
    let axis_count = doc
        .columns
        .iter()
        .position(|c| oam_core::scenario::Metric::from_id(c).is_ok())
        .unwrap_or(doc.columns.len());
    let rows = doc
        .rows
        .iter()
        .map(|r| {
            if r.len() != doc.columns.len() {
                return Err(OutputError::Malformed("row length differs from header".into()));
            }
            Ok(ResultRow {
                axes: r[..axis_count].iter().map(read_number).collect::<Result<_, _>>()?,
                case: None,
                values: r[axis_count..].iter().map(read_number).collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResultSet {
        meta: doc.meta,
        axis_names: doc.columns[..axis_count].to_vec(),
        has_case: false,
        metric_names: doc.columns[axis_count..].to_vec(),
        rows,
    })
}

pub fn render(rs: &ResultSet, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Csv => to_csv(rs),
        OutputFormat::Json => to_json(rs),
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit_results(rs: &ResultSet, format: OutputFormat, path: Option<&Path>) -> Result<(), OutputError> {
    let bytes = render(rs, format);
    let (result, name) = match path {
        Some(p) => (std::fs::write(p, &bytes), p.display().to_string()),
        None => (std::io::stdout().lock().write_all(&bytes), "stdout".to_string()),
    };
    result.map_err(|e| OutputError::Io {
        path: name,
        message: e.to_string(),
    })
}
