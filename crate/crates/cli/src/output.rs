use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// CSV rows under a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces.
pub struct Report {
    pub command: &'static str,
    pub json: Value,
    pub table: Table,
    /// Extra JSON document written next to a CSV file.
    pub sidecar: Option<(&'static str, Value)>,
}

pub fn num(x: f64) -> String {
    // fold -0 so identical values print identically
    if x == 0.0 {
        "0".into()
    } else {
        x.to_string()
    }
}

pub fn to_value<S: Serialize>(v: &S) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

fn render_json(command: &str, body: &Value) -> Result<String, CliError> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    doc.insert("command".into(), command.into());
    match body {
        Value::Object(fields) => doc.extend(fields.clone()),
        other => {
            doc.insert("result".into(), other.clone());
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
    text.push('\n');
    Ok(text)
}

fn render_csv(command: &str, table: &Table) -> Result<String, CliError> {
    let mut buf = format!("# apqr {command} v{SCHEMA_VERSION}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| CliError::Output(e.to_string()))
}

fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}.json"))
}

pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Json => render_json(report.command, &report.json)?,
        Format::Csv => render_csv(report.command, &report.table)?,
    };
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            if let (Format::Csv, Some((suffix, doc))) = (format, &report.sidecar) {
                std::fs::write(sidecar_path(path, suffix), render_json(report.command, doc)?)?;
            }
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
