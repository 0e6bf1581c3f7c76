//! Report assembly and output.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::{Cli, Format};
use qt_core::{QtError, Result};

/// Every run emits one of these; all numeric claims carry their achieved
/// error bounds inside `results`.
#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub pass: bool,
    pub wall_time_ms: u128,
}

pub struct ReportBuilder {
    command: String,
    parameters: Value,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: &str, parameters: Value) -> Self {
        ReportBuilder { command: command.to_string(), parameters, started: Instant::now() }
    }

    pub fn finish(self, results: Value, pass: bool) -> Report {
        Report {
            command: self.command,
            parameters: self.parameters,
            results,
            pass,
            wall_time_ms: self.started.elapsed().as_millis(),
        }
    }
}

/// Columns for plot-ready CSV output of sequence-valued reports.
pub fn sequence_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn emit(cli: &Cli, report: &Report, csv: Option<String>) -> Result<()> {
    let text = match cli.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!(report)).map_err(|e| QtError::Config(e.to_string()))?
        }
        Format::Csv => csv.ok_or_else(|| {
            QtError::Config("csv output is only available for sequence-valued reports".into())
        })?,
    };
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| QtError::Config(format!("cannot create {}: {e}", path.display())))?;
            f.write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { f.write_all(b"\n") })
                .map_err(|e| QtError::Config(e.to_string()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}
