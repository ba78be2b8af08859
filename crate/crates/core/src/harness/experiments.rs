//! One function per experiment kind, each producing a CSV table, summary
//! checks and experiment-specific details.

use std::f64::consts::TAU;

use serde_json::json;

use super::config::{ExperimentConfig, SurfaceSpec};
use super::output::{CsvTable, DiagnosticRow};
use crate::action::{action_report, ActionSettings};
use crate::cauchy::invariant_drift_series;
use crate::clebsch::{self, candidate_from_name};
use crate::field::{from_name, FlowField};
use crate::flow_map::{mass_deviation, sample_trajectory, IntegratorConfig};
use crate::geometry::{
    advect_surface, boundary_circulation, helmholtz_series, refined_kelvin_series, vorticity_flux,
    MaterialLoop, MaterialSurface, Refinement,
};
use crate::numerics::halton;
use crate::{Error, Result, Vec3};

/// A named pass/fail comparison `value ≤ tolerance`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

/// Everything an experiment produces before it is written out.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub table: CsvTable,
    pub rows: Vec<DiagnosticRow>,
    /// The first check is the primary one reported as `max_deviation`.
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
}

fn v3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn integrator(cfg: &ExperimentConfig) -> Result<IntegratorConfig> {
    IntegratorConfig::new(cfg.integrator.h, cfg.integrator.t_max.max(cfg.integrator.h))
}

fn seeds(cfg: &ExperimentConfig, field: &dyn FlowField) -> Vec<Vec3> {
    let spec = cfg.geometry.seeds.clone().unwrap_or_default();
    if let Some(points) = &spec.points {
        return points.iter().map(v3).collect();
    }
    let (lo, hi) = field.domain().sample_box();
    let lo = spec.lo.as_ref().map(v3).unwrap_or(lo);
    let hi = spec.hi.as_ref().map(v3).unwrap_or(hi);
    halton::halton_points(spec.count.unwrap_or(100), &lo, &hi)
}

fn box_center(field: &dyn FlowField) -> Vec3 {
    let (lo, hi) = field.domain().sample_box();
    (lo + hi) / 2.0
}

type LoopBuilder = Box<dyn Fn(usize) -> Result<MaterialLoop>>;

fn material_loop(cfg: &ExperimentConfig, field: &dyn FlowField) -> (String, LoopBuilder) {
    match &cfg.geometry.material_loop {
        Some(l) => {
            let (c, r, nrm) = (v3(&l.center), l.radius, v3(&l.normal));
            (
                format!("circle-r{r}"),
                Box::new(move |n| MaterialLoop::circle(&c, r, &nrm, n)),
            )
        }
        None => {
            let c = box_center(field);
            (
                "circle-r1".into(),
                Box::new(move |n| MaterialLoop::circle(&c, 1.0, &Vec3::z(), n)),
            )
        }
    }
}

fn surface(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<(String, MaterialSurface)> {
    let [ns, nr] = cfg.quadrature.surface_grid;
    match &cfg.geometry.surface {
        Some(SurfaceSpec::Disk {
            center,
            radius,
            normal,
        }) => Ok((
            format!("disk-r{radius}"),
            MaterialSurface::disk(&v3(center), *radius, &v3(normal), ns, nr)?,
        )),
        Some(SurfaceSpec::Rectangle {
            origin,
            edge1,
            edge2,
        }) => Ok((
            "rectangle".into(),
            MaterialSurface::rectangle(&v3(origin), &v3(edge1), &v3(edge2), ns, nr)?,
        )),
        None => Ok((
            "disk-r1".into(),
            MaterialSurface::disk(&box_center(field), 1.0, &Vec3::z(), ns, nr)?,
        )),
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// `|v − r| / |r|`, or the absolute difference when `r` vanishes.
fn relative(v: f64, r: f64) -> f64 {
    if r.abs() > 1e-12 {
        (v - r).abs() / r.abs()
    } else {
        (v - r).abs()
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    use super::config::Experiment::*;
    let field = from_name(&cfg.field.name, &cfg.field.params)?;
    let field = field.as_ref();
    match cfg.experiment {
        Mass => mass(cfg, field),
        Cauchy => cauchy(cfg, field),
        Kelvin => kelvin(cfg, field),
        Helmholtz => helmholtz(cfg, field),
        Stokes => stokes(cfg, field),
        Clebsch => clebsch_checks(cfg, field),
        Helicity => helicity(cfg, field),
        Action => action(cfg, field),
    }
}

fn mass(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let times = cfg.sample_times();
    let mut header = vec!["t".to_string()];
    header.extend(["a1", "a2", "a3", "x1", "x2", "x3"].map(String::from));
    for i in 1..=3 {
        for j in 1..=3 {
            header.push(format!("J{i}{j}"));
        }
    }
    header.push("detJ".into());
    let mut table = CsvTable::new(header);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, a) in seeds(cfg, field).iter().enumerate() {
        for s in sample_trajectory(field, a, &times, &ic)? {
            let dev = mass_deviation(field, &s)?;
            worst = worst.max(dev);
            let mut r = vec![fmt(s.time)];
            r.extend(s.label.iter().chain(s.position.iter()).map(|v| fmt(*v)));
            for ii in 0..3 {
                for jj in 0..3 {
                    r.push(fmt(s.jacobian[(ii, jj)]));
                }
            }
            let det = s.det_jacobian();
            r.push(fmt(det));
            table.push(r);
            rows.push(
                DiagnosticRow::new("mass", field.name(), format!("seed-{i}"), s.time, det)
                    .with_reference(
                        field.density(&s.label, 0.0) / field.density(&s.position, s.time),
                    ),
            );
        }
    }
    Ok(ExperimentOutput {
        table,
        rows,
        checks: vec![Check::new("mass_deviation", worst, cfg.tolerance())],
        details: json!({ "seeds": seeds(cfg, field).len(), "times": times }),
    })
}

fn cauchy(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let times = cfg.sample_times();
    let seeds = seeds(cfg, field);
    let records = invariant_drift_series(field, &seeds, &times, &ic)?;
    let header = [
        "field", "a1", "a2", "a3", "t", "inv1", "inv2", "inv3", "om01", "om02", "om03", "drift",
    ];
    let mut table = CsvTable::new(header.map(String::from).to_vec());
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, r) in records.iter().enumerate() {
        worst = worst.max(r.drift);
        let mut line = vec![field.name().to_string()];
        line.extend(r.label.iter().map(|v| fmt(*v)));
        line.push(fmt(r.time));
        line.extend(r.invariant.iter().chain(r.omega0.iter()).map(|v| fmt(*v)));
        line.push(fmt(r.drift));
        table.push(line);
        rows.push(
            DiagnosticRow::new(
                "cauchy",
                field.name(),
                format!("seed-{}", k / times.len()),
                r.time,
                r.drift,
            )
            .with_reference(0.0),
        );
    }
    Ok(ExperimentOutput {
        table,
        rows,
        checks: vec![Check::new("max_drift", worst, cfg.tolerance())],
        details: json!({ "seeds": seeds.len(), "times": times }),
    })
}

fn series_table(
    quantity: &str,
    field: &dyn FlowField,
    gid: &str,
    series: &[(f64, f64, usize)],
    m: Option<usize>,
) -> (CsvTable, Vec<DiagnosticRow>, f64) {
    let header = ["field", "geometry-id", "t", quantity, "N", "M"];
    let mut table = CsvTable::new(header.map(String::from).to_vec());
    let mut rows = Vec::new();
    let reference = series.first().map(|s| s.1).unwrap_or(0.0);
    let mut worst: f64 = 0.0;
    for &(t, v, n) in series {
        worst = worst.max(relative(v, reference));
        table.push(vec![
            field.name().to_string(),
            gid.to_string(),
            fmt(t),
            fmt(v),
            n.to_string(),
            m.map(|m| m.to_string()).unwrap_or_default(),
        ]);
        rows.push(DiagnosticRow::new(quantity, field.name(), gid, t, v).with_reference(reference));
    }
    (table, rows, worst)
}

fn kelvin(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let (gid, build) = material_loop(cfg, field);
    let n0 = cfg.quadrature.loop_markers;
    let refine = Refinement {
        max_markers: cfg.quadrature.max_loop_markers.unwrap_or(n0),
        ..Refinement::default()
    };
    let series = refined_kelvin_series(build, n0, field, &cfg.sample_times(), &ic, &refine)?;
    let (table, rows, worst) = series_table("circulation", field, &gid, &series, None);
    Ok(ExperimentOutput {
        table,
        rows,
        checks: vec![Check::new("circulation_drift", worst, cfg.tolerance())],
        details: json!({
            "initial_circulation": series.first().map(|s| s.1),
            "final_markers": series.last().map(|s| s.2),
        }),
    })
}

fn helmholtz(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let (gid, s) = surface(cfg, field)?;
    let (ns, nr) = s.dims();
    let series: Vec<_> = helmholtz_series(&s, field, &cfg.sample_times(), &ic)?
        .into_iter()
        .map(|(t, v)| (t, v, ns))
        .collect();
    let (table, rows, worst) = series_table("flux", field, &gid, &series, Some(nr));
    Ok(ExperimentOutput {
        table,
        rows,
        checks: vec![Check::new("flux_drift", worst, cfg.tolerance())],
        details: json!({ "initial_flux": series.first().map(|s| s.1) }),
    })
}

fn stokes(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let (gid, s0) = surface(cfg, field)?;
    let (ns, nr) = s0.dims();
    let header = ["field", "geometry-id", "t", "circulation", "flux", "N", "M"];
    let mut table = CsvTable::new(header.map(String::from).to_vec());
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut current = s0;
    for t in cfg.sample_times() {
        current = advect_surface(&current, field, t, &ic)?;
        let circ = boundary_circulation(&current, field)?;
        let flux = vorticity_flux(&current, field)?;
        worst = worst.max((circ - flux).abs());
        table.push(vec![
            field.name().to_string(),
            gid.clone(),
            fmt(t),
            fmt(circ),
            fmt(flux),
            ns.to_string(),
            nr.to_string(),
        ]);
        rows.push(
            DiagnosticRow::new("stokes", field.name(), gid.as_str(), t, circ).with_reference(flux),
        );
    }
    Ok(ExperimentOutput {
        table,
        rows,
        checks: vec![Check::new("stokes_residual", worst, cfg.tolerance())],
        details: json!({}),
    })
}

fn diagnostic_table(rows: &[DiagnosticRow]) -> CsvTable {
    let header = [
        "experiment",
        "field",
        "geometry-id",
        "t",
        "value",
        "reference",
        "deviation",
    ];
    let mut table = CsvTable::new(header.map(String::from).to_vec());
    for r in rows {
        table.push(vec![
            r.experiment.clone(),
            r.field.clone(),
            r.geometry_id.clone(),
            fmt(r.t),
            fmt(r.value),
            r.reference.map(fmt).unwrap_or_default(),
            r.deviation.map(fmt).unwrap_or_default(),
        ]);
    }
    table
}

fn clebsch_checks(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let name = cfg.candidate.as_deref().expect("validated");
    let cand = candidate_from_name(name)?;
    let cand = cand.as_ref();
    let grid = cfg.quadrature.check_grid;
    let tol = cfg.tolerance();
    let seeds = seeds(cfg, field);
    let mut rows = Vec::new();
    let dev = clebsch::verify_material_invariance(cand, field, &seeds, cfg.integrator.t_max, &ic)?;
    rows.push(
        DiagnosticRow::new(
            "clebsch",
            field.name(),
            "material_phi",
            cfg.integrator.t_max,
            dev.phi,
        )
        .with_reference(0.0),
    );
    rows.push(
        DiagnosticRow::new(
            "clebsch",
            field.name(),
            "material_psi",
            cfg.integrator.t_max,
            dev.psi,
        )
        .with_reference(0.0),
    );
    let (mut factor, mut gauge, mut bern): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut gauge_ok = true;
    for t in cfg.sample_times() {
        let f = clebsch::verify_vorticity_factorization(cand, field, t, grid)?;
        let g = clebsch::verify_gauge_existence(cand, field, t, grid)?;
        factor = factor.max(f);
        gauge = gauge.max(g);
        rows.push(
            DiagnosticRow::new("clebsch", field.name(), "factorization", t, f).with_reference(0.0),
        );
        rows.push(DiagnosticRow::new("clebsch", field.name(), "gauge", t, g).with_reference(0.0));
        match clebsch::clebsch8_identity_check(cand, field, t, grid) {
            Ok(b) => {
                bern = bern.max(b);
                rows.push(
                    DiagnosticRow::new("clebsch", field.name(), "clebsch8", t, b)
                        .with_reference(0.0),
                );
            }
            Err(Error::GaugeIllDefined { .. }) => gauge_ok = false,
            Err(e) => return Err(e),
        }
    }
    let material = dev.max();
    let passes = material <= tol && factor <= tol && gauge <= tol;
    let helicity = if field.domain().is_periodic() {
        Some(clebsch::helicity(field, 0.0, cfg.quadrature.box_points)?)
    } else {
        None
    };
    let clebsch8 = if gauge_ok { Some(bern) } else { None };
    let mut checks = vec![
        Check::new("material_residual", material, tol),
        Check::new("factorization_residual", factor, tol),
        Check::new("gauge_residual", gauge, tol),
    ];
    checks.push(Check::new(
        "clebsch8_residual",
        clebsch8.unwrap_or(f64::INFINITY),
        tol,
    ));
    let details = json!({
        "candidate": name,
        "material_residual": material,
        "material_phi": dev.phi,
        "material_psi": dev.psi,
        "factorization_residual": factor,
        "gauge_residual": gauge,
        "clebsch8_residual": clebsch8,
        "helicity": helicity.map(|h| h.value),
        "obstruction": helicity.map(|h| h.obstruction),
        "verdict": clebsch::verdict(helicity.as_ref(), Some(passes)),
    });
    Ok(ExperimentOutput {
        table: diagnostic_table(&rows),
        rows,
        checks,
        details,
    })
}

/// Closed-form helicity for catalog fields where it is known.
fn reference_helicity(cfg: &ExperimentConfig) -> Option<f64> {
    let p = |k: &str| {
        cfg.field
            .params
            .get(k)
            .and_then(|v| v.as_f64())
            .unwrap_or(1.0)
    };
    match cfg.field.name.as_str() {
        "abc" => Some(TAU.powi(3) * (p("A").powi(2) + p("B").powi(2) + p("C").powi(2))),
        "ptg" | "shear" => Some(0.0),
        _ => None,
    }
}

fn helicity(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let t = cfg.sample_times().first().copied().unwrap_or(0.0);
    let h = clebsch::helicity(field, t, cfg.quadrature.box_points)?;
    let reference = reference_helicity(cfg);
    let mut row = DiagnosticRow::new("helicity", field.name(), "box", t, h.value);
    let mut checks = Vec::new();
    if let Some(r) = reference {
        row = row.with_reference(r);
        checks.push(Check::new(
            "helicity_deviation",
            relative(h.value, r),
            cfg.tolerance(),
        ));
    }
    let rows = vec![row];
    Ok(ExperimentOutput {
        table: diagnostic_table(&rows),
        rows,
        checks,
        details: json!({
            "helicity": h.value,
            "quadrature_points": h.quadrature_points,
            "obstruction": h.obstruction,
            "verdict": clebsch::verdict(Some(&h), None),
        }),
    })
}

fn action(cfg: &ExperimentConfig, field: &dyn FlowField) -> Result<ExperimentOutput> {
    let ic = integrator(cfg)?;
    let a = &cfg.action;
    let settings = ActionSettings {
        lo: v3(&a.lo),
        hi: v3(&a.hi),
        lattice: a.lattice,
        steps: a.steps,
        horizon: a.horizon,
        epsilons: a.epsilons.clone(),
        perturbations: a.perturbations,
        seed: a.seed,
        model: a.model,
    };
    let report = action_report(field, &settings, &ic)?;
    let mut table = CsvTable::new(
        ["field", "perturbation", "epsilon", "first_variation"]
            .map(String::from)
            .to_vec(),
    );
    let mut rows = Vec::new();
    for (p, series) in report.first_variation_by_epsilon.iter().enumerate() {
        for &(eps, v) in series {
            table.push(vec![
                field.name().to_string(),
                p.to_string(),
                fmt(eps),
                fmt(v),
            ]);
        }
        rows.push(
            DiagnosticRow::new(
                "action",
                field.name(),
                format!("perturbation-{p}"),
                a.horizon,
                report.observed_orders[p],
            )
            .with_reference(2.0),
        );
    }
    let order_dev = report
        .observed_orders
        .iter()
        .map(|o| {
            if o.is_finite() {
                (o - 2.0).abs()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let checks = vec![
        Check::new("order_deviation", order_dev, cfg.tolerance()),
        Check::new(
            "weak_strong_gap",
            report.weak_strong_gap,
            a.weak_strong_tolerance,
        ),
        Check::new("el_residual_max", report.el_residual_max, 1e-6),
    ];
    Ok(ExperimentOutput {
        table,
        rows,
        checks,
        details: serde_json::to_value(&report).expect("report serializes"),
    })
}
