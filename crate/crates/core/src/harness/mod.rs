//! JSON-configured experiment runner behind the `lagflow` binary.
//!
//! Exit statuses: `0` pass, `1` tolerance failure, `2` configuration or
//! usage error, `3` numerical failure (the summary is still written), `4`
//! I/O error.

mod config;
mod experiments;
mod output;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{
    parse_config, ActionSpec, Experiment, ExperimentConfig, FieldSpec, GeometrySpec,
    IntegratorSpec, LoopSpec, OutputSpec, QuadratureSpec, SeedSpec, SurfaceSpec,
};
pub use experiments::{run_experiment, Check, ExperimentOutput};
pub use output::{
    resolve_path, CsvTable, DiagnosticRow, RunStatus, RunSummary, SummaryCheck, DEFAULT_OUTPUT_DIR,
    OUTPUT_DIR_ENV,
};

use crate::numerics::fit;
use crate::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Exit status for an error that ended a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::UnknownField(_)
        | Error::UnknownProfile(_)
        | Error::Constraint(_)
        | Error::DegenerateField(_) => EXIT_USAGE,
        Error::TimeOutOfDomain { .. }
        | Error::NonFinite(_)
        | Error::DegenerateGeometry(_)
        | Error::Unsupported(_)
        | Error::GaugeIllDefined { .. } => EXIT_NUMERICAL,
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Result of [`run`]: the summary plus the CSV table when the experiment
/// completed.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub table: Option<CsvTable>,
    pub rows: Vec<DiagnosticRow>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.summary.status {
            RunStatus::Pass => EXIT_PASS,
            RunStatus::Fail => EXIT_FAIL,
            RunStatus::Error => EXIT_NUMERICAL,
        }
    }
}

/// Executes the experiment without touching the file system. Numerical
/// failures become an `error` summary rather than an `Err`.
pub fn run(cfg: &ExperimentConfig) -> RunOutcome {
    let mut summary = RunSummary {
        id: cfg.id(),
        experiment: cfg.experiment.as_str().to_string(),
        field: cfg.field.name.clone(),
        status: RunStatus::Error,
        pass: false,
        max_deviation: None,
        tolerance: cfg.tolerance(),
        checks: Vec::new(),
        error: None,
        details: serde_json::Value::Null,
        csv_path: None,
    };
    match run_experiment(cfg) {
        Ok(out) => {
            let pass = out.checks.iter().all(|c| c.pass);
            summary.status = if pass {
                RunStatus::Pass
            } else {
                RunStatus::Fail
            };
            summary.pass = pass;
            summary.max_deviation = out
                .checks
                .first()
                .map(|c| c.value)
                .filter(|v| v.is_finite());
            summary.checks = out.checks.iter().map(SummaryCheck::from).collect();
            summary.details = out.details;
            RunOutcome {
                summary,
                table: Some(out.table),
                rows: out.rows,
            }
        }
        Err(e) => {
            summary.error = Some(e.to_string());
            RunOutcome {
                summary,
                table: None,
                rows: Vec::new(),
            }
        }
    }
}

/// Runs and writes the CSV (if any) and the JSON summary. Returns the
/// outcome and the summary path.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<(RunOutcome, PathBuf)> {
    let id = cfg.id();
    let mut outcome = run(cfg);
    let csv = resolve_path(cfg.output.csv_path.as_deref(), &format!("{id}.csv"));
    let json = resolve_path(cfg.output.json_path.as_deref(), &format!("{id}.json"));
    if let Some(table) = &outcome.table {
        output::write_file(&csv, &table.to_bytes()?)?;
        outcome.summary.csv_path = Some(csv.display().to_string());
    }
    output::write_json(&json, &outcome.summary)?;
    Ok((outcome, json))
}

/// Parameters a sweep may vary.
pub const SWEEP_PARAMETERS: [&str; 4] = ["h", "loop_markers", "surface_grid", "box_points"];

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub max_deviation: Option<f64>,
    pub status: RunStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub id: String,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    /// Observed convergence order; positive when the deviation decreases
    /// with refinement. Absent with fewer than two usable rows.
    pub fitted_order: Option<f64>,
}

impl SweepTable {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(vec![self.parameter.clone(), "max_deviation".into()]);
        for r in &self.rows {
            t.push(vec![
                format!("{}", r.value),
                r.max_deviation.map(|d| format!("{d}")).unwrap_or_default(),
            ]);
        }
        t
    }
}

fn set_parameter(cfg: &mut ExperimentConfig, parameter: &str, value: f64) -> Result<()> {
    let count = || {
        if value >= 1.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(Error::param(
                parameter,
                format!("must be a positive integer, got {value}"),
            ))
        }
    };
    match parameter {
        "h" => cfg.integrator.h = value,
        "loop_markers" => cfg.quadrature.loop_markers = count()?,
        "surface_grid" => cfg.quadrature.surface_grid = [count()?; 2],
        "box_points" => cfg.quadrature.box_points = count()?,
        other => {
            return Err(Error::param(
                "param",
                format!(
                    "cannot sweep `{other}`; choose one of {}",
                    SWEEP_PARAMETERS.join(", ")
                ),
            ))
        }
    }
    cfg.validate()
}

/// Reruns the experiment for each value of `parameter`.
pub fn sweep(cfg: &ExperimentConfig, parameter: &str, values: &[f64]) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::param("values", "needs at least one value"));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let mut c = cfg.clone();
        set_parameter(&mut c, parameter, v)?;
        let out = run(&c);
        rows.push(SweepRow {
            value: v,
            max_deviation: out.summary.max_deviation,
            status: out.summary.status,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.max_deviation.map(|d| (r.value, d)))
        .unzip();
    let slope = if rows.len() > 1 {
        fit::log_log_slope(&x, &y)
    } else {
        None
    };
    // Step sizes shrink under refinement, marker counts grow.
    let fitted_order = slope.map(|s| if parameter == "h" { s } else { -s });
    Ok(SweepTable {
        id: cfg.id(),
        parameter: parameter.to_string(),
        rows,
        fitted_order,
    })
}

/// Writes a sweep's CSV table and JSON document next to the run outputs.
pub fn write_sweep(cfg: &ExperimentConfig, table: &SweepTable) -> Result<(PathBuf, PathBuf)> {
    let stem = format!("{}_sweep_{}", table.id, table.parameter);
    let csv_name = format!("{stem}.csv");
    let json_name = format!("{stem}.json");
    let dir = |p: &Option<PathBuf>| p.as_deref().and_then(|p| p.parent()).map(Path::to_path_buf);
    let join = |d: Option<PathBuf>, n: &str| d.map(|d| d.join(n));
    let csv = resolve_path(
        join(dir(&cfg.output.csv_path), &csv_name).as_deref(),
        &csv_name,
    );
    let json = resolve_path(
        join(dir(&cfg.output.json_path), &json_name).as_deref(),
        &json_name,
    );
    output::write_file(&csv, &table.to_csv().to_bytes()?)?;
    output::write_json(&json, table)?;
    Ok((csv, json))
}

/// Collects every run summary in `dir` (sorted by file name) into one
/// CSV-formatted table. Files that are not run summaries are skipped.
pub fn report(dir: &Path) -> Result<(CsvTable, Vec<RunSummary>)> {
    let io = |source| Error::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut summaries = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        })?;
        if let Ok(s) = serde_json::from_str::<RunSummary>(&text) {
            summaries.push(s);
        }
    }
    let mut table = CsvTable::new(
        [
            "id",
            "experiment",
            "field",
            "status",
            "max_deviation",
            "tolerance",
        ]
        .map(String::from)
        .to_vec(),
    );
    for s in &summaries {
        table.push(vec![
            s.id.clone(),
            s.experiment.clone(),
            s.field.clone(),
            format!("{:?}", s.status).to_lowercase(),
            s.max_deviation
                .map(|d| format!("{d:e}"))
                .unwrap_or_default(),
            format!("{:e}", s.tolerance),
        ]);
    }
    Ok((table, summaries))
}
