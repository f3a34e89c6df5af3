//! Report records and their on-disk formats.

use super::config::Format;
use crate::error::Result;
use serde_json::{json, Map, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Decimal text of `x` at 15 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{}", round15(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// Enumeration stopped at its cap; `records` holds what finished.
    CapAbort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub command: String,
    pub config: Value,
    pub version: &'static str,
    pub field_fingerprint: Option<String>,
    pub status: RunStatus,
    pub error: Option<String>,
    pub summary: Value,
    /// Column order for CSV output.
    pub columns: Vec<&'static str>,
    pub records: Vec<Value>,
    pub wall_time_ms: u64,
}

impl RunResult {
    pub fn new(command: &str, config: Value, columns: Vec<&'static str>) -> Self {
        RunResult {
            command: command.into(),
            config,
            version: env!("CARGO_PKG_VERSION"),
            field_fingerprint: None,
            status: RunStatus::Ok,
            error: None,
            summary: Value::Null,
            columns,
            records: Vec::new(),
            wall_time_ms: 0,
        }
    }

    fn records_file(&self, format: Format) -> &'static str {
        match format {
            Format::Json => "records.jsonl",
            Format::Csv => "records.csv",
        }
    }

    pub fn manifest(&self, format: Format) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "version": self.version,
            "field_fingerprint": self.field_fingerprint,
            "status": match self.status { RunStatus::Ok => "ok", RunStatus::CapAbort => "cap_abort" },
            "error": self.error,
            "config": self.config,
            "summary": self.summary,
            "columns": self.columns,
            "record_count": self.records.len(),
            "records_file": self.records_file(format),
            "wall_time_ms": self.wall_time_ms,
        })
    }

    /// Each record with the schema version and the full config attached.
    pub fn full_records(&self) -> Vec<Value> {
        self.records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("schema_version".into(), json!(SCHEMA_VERSION));
                m.insert("command".into(), json!(self.command));
                m.insert("config".into(), self.config.clone());
                m.insert("field_fingerprint".into(), json!(self.field_fingerprint));
                if let Value::Object(o) = r {
                    for (k, v) in o {
                        m.insert(k.clone(), v.clone());
                    }
                }
                Value::Object(m)
            })
            .collect()
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn config_hash(config: &Value) -> String {
    use sha2::{Digest, Sha256};
    let h = Sha256::digest(config.to_string().as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Writes `manifest.json` and `records.jsonl` or `records.csv` into `dir`.
/// CSV rows carry `schema_version` and a hash of the config echoed in the
/// manifest.
pub fn write_report(result: &RunResult, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let records_path = dir.join(result.records_file(format));
    match format {
        Format::Json => {
            let mut f = fs::File::create(&records_path)?;
            for r in result.full_records() {
                writeln!(f, "{}", serde_json::to_string(&r)?)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_path(&records_path).map_err(csv_err)?;
            let mut header: Vec<&str> = result.columns.clone();
            header.extend(["schema_version", "config_hash"]);
            w.write_record(&header).map_err(csv_err)?;
            let hash = config_hash(&result.config);
            for r in &result.records {
                let mut row: Vec<String> = result.columns.iter().map(|c| cell(r.get(*c))).collect();
                row.push(SCHEMA_VERSION.to_string());
                row.push(hash.clone());
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    let manifest_path = dir.join("manifest.json");
    let mut manifest = result.manifest(format);
    if format == Format::Csv {
        manifest["config_hash"] = json!(config_hash(&result.config));
    }
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(vec![manifest_path, records_path])
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => crate::error::Error::InvalidInput(format!("csv: {other:?}")),
    }
}
