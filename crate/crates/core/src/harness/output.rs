//! CSV tables, diagnostic rows, run summaries and output paths.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiments::Check;
use crate::{Error, Result};

/// Environment variable overriding the directory all outputs go to.
pub const OUTPUT_DIR_ENV: &str = "LAGFLOW_OUTPUT_DIR";

/// Directory used when neither the config nor the environment names one.
pub const DEFAULT_OUTPUT_DIR: &str = "lagflow-out";

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(format!("csv encoding failed: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner()
            .map_err(|e| Error::Config(format!("csv encoding failed: {e}")))
    }
}

/// One `(experiment, field, geometry-id, t, value, reference, deviation)`
/// diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRow {
    pub experiment: String,
    pub field: String,
    pub geometry_id: String,
    pub t: f64,
    pub value: f64,
    pub reference: Option<f64>,
    pub deviation: Option<f64>,
}

impl DiagnosticRow {
    pub fn new(
        experiment: impl Into<String>,
        field: impl Into<String>,
        geometry_id: impl Into<String>,
        t: f64,
        value: f64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            field: field.into(),
            geometry_id: geometry_id.into(),
            t,
            value,
            reference: None,
            deviation: None,
        }
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self.deviation = Some((self.value - reference).abs());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Pass,
    Fail,
    Error,
}

/// JSON summary written for every run, including failed ones.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub id: String,
    pub experiment: String,
    pub field: String,
    pub status: RunStatus,
    pub pass: bool,
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
    #[serde(default)]
    pub checks: Vec<SummaryCheck>,
    pub error: Option<String>,
    #[serde(default)]
    pub details: serde_json::Value,
    pub csv_path: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryCheck {
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&Check> for SummaryCheck {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            value: c.value.is_finite().then_some(c.value),
            tolerance: c.tolerance,
            pass: c.pass,
        }
    }
}

/// Resolves an output file: the environment override keeps only the file
/// name, otherwise the configured path wins, otherwise the default directory.
pub fn resolve_path(configured: Option<&Path>, default_name: &str) -> PathBuf {
    let name = configured
        .and_then(|p| p.file_name())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(default_name));
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(name),
        _ => match configured {
            Some(p) => p.to_path_buf(),
            None => PathBuf::from(DEFAULT_OUTPUT_DIR).join(name),
        },
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Config(format!("json encoding failed: {e}")))?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}
