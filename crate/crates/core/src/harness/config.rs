//! Experiment configuration documents.

use std::path::PathBuf;

use serde::Deserialize;

use crate::action::PotentialModel;
use crate::field::FieldParams;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Mass,
    Cauchy,
    Kelvin,
    Helmholtz,
    Stokes,
    Clebsch,
    Helicity,
    Action,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Mass => "mass",
            Experiment::Cauchy => "cauchy",
            Experiment::Kelvin => "kelvin",
            Experiment::Helmholtz => "helmholtz",
            Experiment::Stokes => "stokes",
            Experiment::Clebsch => "clebsch",
            Experiment::Helicity => "helicity",
            Experiment::Action => "action",
        }
    }

    /// Pass threshold used when the config gives none.
    pub fn default_tolerance(&self) -> f64 {
        match self {
            Experiment::Mass | Experiment::Stokes | Experiment::Clebsch | Experiment::Helicity => {
                1e-6
            }
            Experiment::Cauchy | Experiment::Kelvin | Experiment::Helmholtz => 1e-5,
            Experiment::Action => 0.3,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default)]
    pub params: FieldParams,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    /// Number of Halton points in the sample box (or in `[lo, hi]`).
    pub count: Option<usize>,
    pub lo: Option<[f64; 3]>,
    pub hi: Option<[f64; 3]>,
    /// Explicit seeds; overrides `count`.
    pub points: Option<Vec<[f64; 3]>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default = "default_normal")]
    pub normal: [f64; 3],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SurfaceSpec {
    Disk {
        center: [f64; 3],
        radius: f64,
        #[serde(default = "default_normal")]
        normal: [f64; 3],
    },
    Rectangle {
        origin: [f64; 3],
        edge1: [f64; 3],
        edge2: [f64; 3],
    },
}

fn default_normal() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub seeds: Option<SeedSpec>,
    #[serde(rename = "loop")]
    pub material_loop: Option<LoopSpec>,
    pub surface: Option<SurfaceSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    pub sample_times: Option<Vec<f64>>,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            h: default_h(),
            t_max: default_t_max(),
            sample_times: None,
        }
    }
}

fn default_h() -> f64 {
    1e-3
}

fn default_t_max() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_loop_markers")]
    pub loop_markers: usize,
    /// Cap for marker doubling on stretching loops; unset keeps
    /// `loop_markers` fixed.
    #[serde(default)]
    pub max_loop_markers: Option<usize>,
    #[serde(default = "default_surface_grid")]
    pub surface_grid: [usize; 2],
    #[serde(default = "default_box_points")]
    pub box_points: usize,
    /// Points per axis of the grid used by the Clebsch residual checks.
    #[serde(default = "default_check_grid")]
    pub check_grid: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            loop_markers: default_loop_markers(),
            max_loop_markers: None,
            surface_grid: default_surface_grid(),
            box_points: default_box_points(),
            check_grid: default_check_grid(),
        }
    }
}

fn default_loop_markers() -> usize {
    256
}

fn default_surface_grid() -> [usize; 2] {
    [64, 64]
}

fn default_box_points() -> usize {
    64
}

fn default_check_grid() -> usize {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    #[serde(default = "default_lattice")]
    pub lattice: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_perturbations")]
    pub perturbations: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_model")]
    pub model: PotentialModel,
    #[serde(default = "default_block_lo")]
    pub lo: [f64; 3],
    #[serde(default = "default_block_hi")]
    pub hi: [f64; 3],
    /// Bound on the weak–strong identity gap.
    #[serde(default = "default_weak_strong")]
    pub weak_strong_tolerance: f64,
}

impl Default for ActionSpec {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all action fields have defaults")
    }
}

fn default_lattice() -> usize {
    12
}
fn default_steps() -> usize {
    200
}
fn default_horizon() -> f64 {
    1.0
}
fn default_epsilons() -> Vec<f64> {
    vec![1e-2, 5e-3, 2.5e-3]
}
fn default_perturbations() -> usize {
    5
}
fn default_seed() -> u64 {
    7
}
fn default_model() -> PotentialModel {
    PotentialModel::Elastic
}
fn default_block_lo() -> [f64; 3] {
    [0.5; 3]
}
fn default_block_hi() -> [f64; 3] {
    [1.5; 3]
}
fn default_weak_strong() -> f64 {
    1e-4
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
}

/// Validated experiment configuration with defaults filled in.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: Option<String>,
    pub field: FieldSpec,
    pub experiment: Experiment,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub tolerance: Option<f64>,
    /// Clebsch candidate name.
    pub candidate: Option<String>,
    #[serde(default)]
    pub action: ActionSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn id(&self) -> String {
        self.id
            .clone()
            .unwrap_or_else(|| format!("{}_{}", self.field.name, self.experiment.as_str()))
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or_else(|| self.experiment.default_tolerance())
    }

    /// Sample times, defaulting to six equally spaced times on `[0, t_max]`.
    pub fn sample_times(&self) -> Vec<f64> {
        match &self.integrator.sample_times {
            Some(t) => t.clone(),
            None => (0..6)
                .map(|k| self.integrator.t_max * k as f64 / 5.0)
                .collect(),
        }
    }

    /// Range and consistency checks beyond what the schema enforces.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: String| Err(Error::param(name, reason));
        let ig = &self.integrator;
        if !(ig.h > 0.0 && ig.h.is_finite()) {
            return bad("integrator.h", format!("must be > 0, got {}", ig.h));
        }
        if !(ig.t_max >= 0.0 && ig.t_max.is_finite()) {
            return bad(
                "integrator.t_max",
                format!("must be >= 0, got {}", ig.t_max),
            );
        }
        if let Some(ts) = &ig.sample_times {
            if ts.is_empty() {
                return bad("integrator.sample_times", "must not be empty".into());
            }
            if ts.iter().any(|t| !(*t >= 0.0 && *t <= ig.t_max)) {
                return bad(
                    "integrator.sample_times",
                    format!("every time must lie in [0, {}]", ig.t_max),
                );
            }
            if ts.windows(2).any(|w| w[1] < w[0]) {
                return bad("integrator.sample_times", "must be ascending".into());
            }
        }
        let q = &self.quadrature;
        if q.loop_markers < 8 {
            return bad(
                "quadrature.loop_markers",
                format!("must be >= 8, got {}", q.loop_markers),
            );
        }
        if let Some(m) = q.max_loop_markers {
            if m < q.loop_markers {
                return bad(
                    "quadrature.max_loop_markers",
                    format!("must be >= loop_markers ({}), got {m}", q.loop_markers),
                );
            }
        }
        if q.surface_grid.iter().any(|n| *n < 8) {
            return bad(
                "quadrature.surface_grid",
                format!("must be >= 8, got {:?}", q.surface_grid),
            );
        }
        if q.box_points < 16 {
            return bad(
                "quadrature.box_points",
                format!("must be >= 16, got {}", q.box_points),
            );
        }
        if q.check_grid < 8 {
            return bad(
                "quadrature.check_grid",
                format!("must be >= 8, got {}", q.check_grid),
            );
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return bad("tolerance", format!("must be > 0, got {t}"));
            }
        }
        if let Some(s) = &self.geometry.seeds {
            if s.count == Some(0) || s.points.as_ref().is_some_and(|p| p.is_empty()) {
                return bad("geometry.seeds", "needs at least one seed".into());
            }
        }
        let a = &self.action;
        if a.epsilons.iter().any(|e| !(*e > 0.0)) || a.epsilons.is_empty() {
            return bad(
                "action.epsilons",
                "must be a non-empty list of positive values".into(),
            );
        }
        if a.lattice < 12 {
            return bad(
                "action.lattice",
                format!("must be >= 12, got {}", a.lattice),
            );
        }
        if a.perturbations == 0 {
            return bad("action.perturbations", "must be >= 1".into());
        }
        if self.experiment == Experiment::Clebsch && self.candidate.is_none() {
            return bad(
                "candidate",
                "the clebsch experiment needs a candidate".into(),
            );
        }
        if let Some(c) = &self.candidate {
            crate::clebsch::candidate_from_name(c)?;
        }
        crate::field::from_name(&self.field.name, &self.field.params)?;
        Ok(())
    }
}

/// Parses and validates a JSON configuration document. Schema errors name
/// the offending key path.
pub fn parse_config(document: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Error::Config(inner.to_string())
        } else {
            Error::Config(format!("at `{path}`: {inner}"))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}
