use std::fs;
use std::path::{Path, PathBuf};

use lpmix_core::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct Versions {
    pub lpmix_core: &'static str,
    pub lpmix_cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            lpmix_core: lpmix_core::VERSION,
            lpmix_cli: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Everything a command emits: the resolved config and its result.
#[derive(Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub versions: Versions,
    pub seed: u64,
    pub config: &'a C,
    pub result: &'a R,
}

/// A plot-ready table.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
}

/// Write `<command>.json`, plus `<command>.csv` in csv mode. Returns the paths written.
pub fn write<C: Serialize, R: Serialize>(
    out: &Path,
    format: Format,
    report: &Report<C, R>,
    table: &Table,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    let mut written = Vec::new();
    let json_path = out.join(format!("{}.json", report.command));
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::InvalidInput(e.to_string()))?;
    text.push('\n');
    fs::write(&json_path, text).map_err(|e| io_error(&json_path, e))?;
    written.push(json_path);
    if format == Format::Csv {
        let csv_path = out.join(format!("{}.csv", report.command));
        let mut w = csv::Writer::from_path(&csv_path).map_err(|e| io_error(&csv_path, e))?;
        w.write_record(&table.header).map_err(|e| io_error(&csv_path, e))?;
        for row in &table.rows {
            w.write_record(row).map_err(|e| io_error(&csv_path, e))?;
        }
        w.flush().map_err(|e| io_error(&csv_path, e))?;
        written.push(csv_path);
    }
    Ok(written)
}
