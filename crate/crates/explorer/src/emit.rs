//! CSV and JSON writers for sweep results.
//!
//! Both formats are byte-deterministic for a given spec and build: CSV rows
//! follow the row-major grid order with 16-significant-digit scientific
//! notation; JSON uses the serde shortest-round-trip float encoding, so
//! parsing the emission reproduces every value exactly.

use std::io::Write;
use std::path::Path;

use crate::sweep::{tabulate, SweepResult};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Render a sweep result as CSV: a header row naming axes then quantities,
/// one data row per grid point.
pub fn to_csv_string(result: &SweepResult) -> String {
    let (columns, rows) = tabulate(result);
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{value:.15e}"));
        }
        out.push('\n');
    }
    out
}

/// Render a sweep result as JSON (`spec` echo, `records`, `meta`).
pub fn to_json_string(result: &SweepResult) -> Result<String> {
    let mut s = serde_json::to_string_pretty(result)?;
    s.push('\n');
    Ok(s)
}

/// Write the result to `destination`, or stdout when absent.
pub fn emit(result: &SweepResult, format: Format, destination: Option<&Path>) -> Result<()> {
    let payload = match format {
        Format::Csv => to_csv_string(result),
        Format::Json => to_json_string(result)?,
    };
    match destination {
        Some(path) => std::fs::write(path, payload)?,
        None => std::io::stdout().write_all(payload.as_bytes())?,
    }
    Ok(())
}
