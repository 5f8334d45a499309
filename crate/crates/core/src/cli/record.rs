use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Threshold on the one-photon weight above which the vacuum/one-photon
/// mixture is quantum non-Gaussian. Literature value, not computed here.
pub const QNG_THRESHOLD: f64 = 0.476;

/// One-photon weight above which the Wigner function is negative at the
/// origin.
pub const WIGNER_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub name: String,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    /// Truncation per grid point, in grid order.
    pub dims: Vec<usize>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    /// Reserved; no randomness is used.
    pub seed: u64,
    pub strict: bool,
}

impl Meta {
    pub fn new(dims: Vec<usize>, strict: bool) -> Self {
        Meta {
            tool_version: TOOL_VERSION.to_string(),
            dims,
            tolerances: BTreeMap::new(),
            annotations: Vec::new(),
            seed: 0,
            strict,
        }
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }
}

/// Result of one command: metadata, the input (state spec or grid), and one
/// row per grid point in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub meta: Meta,
    pub input: Value,
    pub rows: Vec<Value>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl RunRecord {
    pub fn new<I: Serialize, R: Serialize>(
        experiment: &str,
        meta: Meta,
        input: &I,
        rows: &[R],
        passed: bool,
    ) -> Result<Self> {
        Ok(RunRecord {
            experiment: experiment.to_string(),
            meta,
            input: to_value(input)?,
            rows: rows.iter().map(to_value).collect::<Result<_>>()?,
            passed,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InternalInconsistency(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed run record: {e}")))
    }

    /// Flat table, one line per row. The first line is `# meta: <json>` so
    /// the file stays self-describing.
    pub fn to_csv(&self) -> Result<String> {
        let flat: Vec<Vec<(String, String)>> = self
            .rows
            .iter()
            .map(|row| {
                let mut cells = Vec::new();
                flatten("", row, &mut cells);
                cells
            })
            .collect();
        let mut header: Vec<String> = vec!["experiment".into()];
        for cells in &flat {
            for (k, _) in cells {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let mut out = Vec::new();
        let meta = serde_json::to_string(&self.meta).map_err(|e| Error::InternalInconsistency(e.to_string()))?;
        writeln!(out, "# meta: {meta}").expect("write to Vec");
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| Error::InternalInconsistency(e.to_string());
            w.write_record(&header).map_err(io)?;
            for cells in &flat {
                let record: Vec<&str> = header
                    .iter()
                    .map(|h| {
                        if h == "experiment" {
                            self.experiment.as_str()
                        } else {
                            cells
                                .iter()
                                .find(|(k, _)| k == h)
                                .map(|(_, v)| v.as_str())
                                .unwrap_or("")
                        }
                    })
                    .collect();
                w.write_record(&record).map_err(io)?;
            }
            w.flush().map_err(|e| Error::InternalInconsistency(e.to_string()))?;
        }
        String::from_utf8(out).map_err(|e| Error::InternalInconsistency(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InternalInconsistency(e.to_string()))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Nested objects and numeric arrays become dotted columns; arrays holding
/// objects are kept as one JSON cell.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&join(prefix, k), child, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            out.push((prefix.to_string(), v.to_string()));
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&join(prefix, &i.to_string()), child, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
