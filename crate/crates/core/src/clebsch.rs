//! Clebsch-pair verification and the helicity obstruction.
//!
//! A candidate pair `(φ, ψ)` is checked for material invariance along
//! trajectories, for the factorization `ω = ∇φ × ∇ψ`, for existence of a
//! gauge function `F` with `u = ∇F + φ∇ψ`, and for the Bernoulli-type
//! uniformity of `V − p − ½|u|² − ∂tF − φ∂tψ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::field::{pressure_work, Domain, FlowField};
use crate::flow_map::{position_increment, step_plan, IntegratorConfig};
use crate::numerics::{fd, halton, quadrature};
use crate::{Error, Result, Vec3};

/// Time step of the centered differences used for `∂tF` and `∂tψ`.
pub const TIME_STEP: f64 = 1e-4;

/// Curl residual above which the gauge function is considered ill-defined.
pub const GAUGE_TOLERANCE: f64 = 1e-6;

/// Gauss–Legendre panels per unit length on each leg of the path used to
/// reconstruct `F`.
const PANELS_PER_UNIT: f64 = 4.0;

pub trait ClebschCandidate: Send + Sync {
    fn name(&self) -> &str;

    /// Catalog field the pair was built for, if any.
    fn field_name(&self) -> Option<&str> {
        None
    }

    fn phi(&self, x: &Vec3, t: f64) -> f64;

    fn psi(&self, x: &Vec3, t: f64) -> f64;

    fn phi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        None
    }

    fn psi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        None
    }

    fn grad_phi(&self, x: &Vec3, t: f64) -> Vec3 {
        self.phi_gradient(x, t)
            .unwrap_or_else(|| fd::gradient4(|y| self.phi(y, t), x, fd::DEFAULT_STEP))
    }

    fn grad_psi(&self, x: &Vec3, t: f64) -> Vec3 {
        self.psi_gradient(x, t)
            .unwrap_or_else(|| fd::gradient4(|y| self.psi(y, t), x, fd::DEFAULT_STEP))
    }
}

/// `φ = x₁`, `ψ = cos x₁ · (x₂ − t sin x₁)` for the sine shear.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShearMaterialPair;

impl ClebschCandidate for ShearMaterialPair {
    fn name(&self) -> &str {
        "shear_material"
    }
    fn field_name(&self) -> Option<&str> {
        Some("shear")
    }
    fn phi(&self, x: &Vec3, _t: f64) -> f64 {
        x[0]
    }
    fn psi(&self, x: &Vec3, t: f64) -> f64 {
        x[0].cos() * (x[1] - t * x[0].sin())
    }
    fn phi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::x())
    }
    fn psi_gradient(&self, x: &Vec3, t: f64) -> Option<Vec3> {
        let (s, c) = x[0].sin_cos();
        Some(Vec3::new(-s * x[1] - t * (c * c - s * s), c, 0.0))
    }
}

/// `φ = x₁`, `ψ = x₂`: factorizes nothing useful and is not material under
/// the shear.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShearNaivePair;

impl ClebschCandidate for ShearNaivePair {
    fn name(&self) -> &str {
        "shear_naive"
    }
    fn field_name(&self) -> Option<&str> {
        Some("shear")
    }
    fn phi(&self, x: &Vec3, _t: f64) -> f64 {
        x[0]
    }
    fn psi(&self, x: &Vec3, _t: f64) -> f64 {
        x[1]
    }
    fn phi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::x())
    }
    fn psi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::y())
    }
}

/// Spatially constant pair; with `φ = 0` it tests for a potential flow.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstantPair {
    pub phi: f64,
    pub psi: f64,
}

impl ClebschCandidate for ConstantPair {
    fn name(&self) -> &str {
        "constant"
    }
    fn phi(&self, _x: &Vec3, _t: f64) -> f64 {
        self.phi
    }
    fn psi(&self, _x: &Vec3, _t: f64) -> f64 {
        self.psi
    }
    fn phi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::zeros())
    }
    fn psi_gradient(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::zeros())
    }
}

type ScalarFn = Box<dyn Fn(&Vec3, f64) -> f64 + Send + Sync>;

/// Candidate built from closures; gradients come from finite differences.
pub struct FnCandidate {
    name: String,
    phi: ScalarFn,
    psi: ScalarFn,
}

impl FnCandidate {
    pub fn new(
        name: impl Into<String>,
        phi: impl Fn(&Vec3, f64) -> f64 + Send + Sync + 'static,
        psi: impl Fn(&Vec3, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            phi: Box::new(phi),
            psi: Box::new(psi),
        }
    }
}

impl ClebschCandidate for FnCandidate {
    fn name(&self) -> &str {
        &self.name
    }
    fn phi(&self, x: &Vec3, t: f64) -> f64 {
        (self.phi)(x, t)
    }
    fn psi(&self, x: &Vec3, t: f64) -> f64 {
        (self.psi)(x, t)
    }
}

pub fn candidate_names() -> &'static [&'static str] {
    &["shear_material", "shear_naive", "zero"]
}

pub fn candidate_from_name(name: &str) -> Result<Box<dyn ClebschCandidate>> {
    match name {
        "shear_material" => Ok(Box::new(ShearMaterialPair)),
        "shear_naive" => Ok(Box::new(ShearNaivePair)),
        "zero" => Ok(Box::new(ConstantPair::default())),
        other => Err(Error::param(
            "candidate",
            format!(
                "unknown candidate `{other}`; known: {}",
                candidate_names().join(", ")
            ),
        )),
    }
}

/// Largest deviations of `φ` and `ψ` from their label values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InvarianceDeviation {
    pub phi: f64,
    pub psi: f64,
}

impl InvarianceDeviation {
    pub fn max(&self) -> f64 {
        self.phi.max(self.psi)
    }
}

/// Max over `seeds` and every integrator step in `[0, t_max]` of
/// `|φ(x(a,t),t) − φ(a,0)|`, and the same for `ψ`.
pub fn verify_material_invariance<C, F>(
    cand: &C,
    field: &F,
    seeds: &[Vec3],
    t_max: f64,
    cfg: &IntegratorConfig,
) -> Result<InvarianceDeviation>
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    if !(t_max >= 0.0) || t_max > cfg.max_time {
        return Err(Error::param(
            "t_max",
            format!("must lie in [0, {}], got {t_max}", cfg.max_time),
        ));
    }
    if !field.valid_time(t_max) {
        return Err(Error::TimeOutOfDomain {
            field: field.name().to_string(),
            t: t_max,
        });
    }
    let (whole, rem) = step_plan(t_max, cfg.step);
    let per_seed: Vec<InvarianceDeviation> = seeds
        .par_iter()
        .map(|a| {
            let (phi0, psi0) = (cand.phi(a, 0.0), cand.psi(a, 0.0));
            let mut dev = InvarianceDeviation::default();
            let mut x = *a;
            let mut t = 0.0;
            let record = |x: &Vec3, t: f64, dev: &mut InvarianceDeviation| {
                dev.phi = dev.phi.max((cand.phi(x, t) - phi0).abs());
                dev.psi = dev.psi.max((cand.psi(x, t) - psi0).abs());
            };
            for k in 0..whole {
                x += position_increment(field, &x, t, cfg.step);
                t = (k + 1) as f64 * cfg.step;
                record(&x, t, &mut dev);
            }
            if rem > 0.0 {
                x += position_increment(field, &x, t, rem);
                record(&x, t_max, &mut dev);
            }
            dev
        })
        .collect();
    let dev = per_seed
        .iter()
        .fold(InvarianceDeviation::default(), |acc, d| {
            InvarianceDeviation {
                phi: acc.phi.max(d.phi),
                psi: acc.psi.max(d.psi),
            }
        });
    crate::error::finite(dev.max(), "material deviation")?;
    Ok(dev)
}

/// Cell-centred `n³` grid over the field's sample box.
pub fn check_grid(domain: &Domain, n: usize) -> Vec<Vec3> {
    let (lo, hi) = domain.sample_box();
    let d = (hi - lo) / n as f64;
    let mut pts = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5);
                pts.push(lo + c.component_mul(&d));
            }
        }
    }
    pts
}

fn check_grid_size(grid: usize) -> Result<()> {
    if grid < 8 {
        return Err(Error::param(
            "grid",
            format!("needs at least 8 points per axis, got {grid}"),
        ));
    }
    Ok(())
}

fn grid_max<G: Fn(&Vec3) -> f64 + Sync>(pts: &[Vec3], g: G, what: &str) -> Result<f64> {
    let vals: Vec<f64> = pts.par_iter().map(&g).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Max over the check grid of `|∇×u − ∇φ×∇ψ|` at time `t`.
pub fn verify_vorticity_factorization<C, F>(cand: &C, field: &F, t: f64, grid: usize) -> Result<f64>
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    check_grid_size(grid)?;
    let pts = check_grid(&field.domain(), grid);
    grid_max(
        &pts,
        |x| (field.vorticity(x, t) - cand.grad_phi(x, t).cross(&cand.grad_psi(x, t))).norm(),
        "vorticity factorization",
    )
}

/// `u − φ∇ψ`, the would-be gradient of the gauge function.
fn gauge_gradient<C, F>(cand: &C, field: &F, x: &Vec3, t: f64) -> Vec3
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    field.velocity(x, t) - cand.grad_psi(x, t) * cand.phi(x, t)
}

/// Max over the check grid of `|∇×(u − φ∇ψ)|`.
pub fn verify_gauge_existence<C, F>(cand: &C, field: &F, t: f64, grid: usize) -> Result<f64>
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    check_grid_size(grid)?;
    let pts = check_grid(&field.domain(), grid);
    grid_max(
        &pts,
        |x| {
            let g = fd::jacobian4(|y| gauge_gradient(cand, field, y, t), x, fd::DEFAULT_STEP);
            fd::curl_from_gradient(&g).norm()
        },
        "gauge curl",
    )
}

/// `F(x, t)` by line integration of `u − φ∇ψ` from the origin along the
/// axis-aligned path `0 → (x₁,0,0) → (x₁,x₂,0) → x`.
pub fn gauge_function<C, F>(cand: &C, field: &F, x: &Vec3, t: f64) -> f64
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    let mut corner = Vec3::zeros();
    let mut total = 0.0;
    for axis in 0..3 {
        let len = x[axis];
        if len != 0.0 {
            let panels = (len.abs() * PANELS_PER_UNIT).ceil() as usize;
            let base = corner;
            total += quadrature::gauss_legendre(
                |s| {
                    let mut y = base;
                    y[axis] = s;
                    gauge_gradient(cand, field, &y, t)[axis]
                },
                0.0,
                len,
                panels,
            );
        }
        corner[axis] = x[axis];
    }
    total
}

/// `V − p − ½|u|² − ∂tF − φ∂tψ`, with `p` the pressure work per unit mass.
fn bernoulli_scalar<C, F>(cand: &C, field: &F, x: &Vec3, t: f64) -> Result<f64>
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    let dt = TIME_STEP;
    let df = (gauge_function(cand, field, x, t + dt) - gauge_function(cand, field, x, t - dt))
        / (2.0 * dt);
    let dpsi = (cand.psi(x, t + dt) - cand.psi(x, t - dt)) / (2.0 * dt);
    let u = field.velocity(x, t);
    Ok(field.force_potential(x, t)
        - pressure_work(field, x, t)?
        - 0.5 * u.norm_squared()
        - df
        - cand.phi(x, t) * dpsi)
}

/// Spread `max − min` of the Bernoulli-type scalar over the check grid. Fails
/// with [`Error::GaugeIllDefined`] when `u − φ∇ψ` is not curl-free.
pub fn clebsch8_identity_check<C, F>(cand: &C, field: &F, t: f64, grid: usize) -> Result<f64>
where
    C: ClebschCandidate + ?Sized,
    F: FlowField + ?Sized,
{
    let gauge = verify_gauge_existence(cand, field, t, grid)?;
    if gauge > GAUGE_TOLERANCE {
        return Err(Error::GaugeIllDefined {
            residual: gauge,
            tolerance: GAUGE_TOLERANCE,
        });
    }
    for s in [t - TIME_STEP, t + TIME_STEP] {
        if !field.valid_time(s) {
            return Err(Error::TimeOutOfDomain {
                field: field.name().to_string(),
                t: s,
            });
        }
    }
    let pts = check_grid(&field.domain(), grid);
    let vals = pts
        .par_iter()
        .map(|x| bernoulli_scalar(cand, field, x, t))
        .collect::<Result<Vec<f64>>>()?;
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    crate::error::finite(hi - lo, "clebsch8 scalar")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HelicityReport {
    pub value: f64,
    pub quadrature_points: usize,
    pub obstruction: bool,
}

/// Obstruction threshold relative to the box volume.
pub const OBSTRUCTION_THRESHOLD: f64 = 1e-6;

/// `∫ u·(∇×u) d³x` over the periodic box by the rectangle rule.
pub fn helicity<F: FlowField + ?Sized>(
    field: &F,
    t: f64,
    n_per_axis: usize,
) -> Result<HelicityReport> {
    let period = match field.domain() {
        Domain::PeriodicBox { period } => period,
        Domain::Unbounded => {
            return Err(Error::Unsupported(format!(
                "helicity needs a periodic field, `{}` is unbounded",
                field.name()
            )))
        }
    };
    if n_per_axis < 16 {
        return Err(Error::param(
            "n_per_axis",
            format!("needs at least 16 points per axis, got {n_per_axis}"),
        ));
    }
    let h = period / n_per_axis as f64;
    let slabs: Vec<f64> = (0..n_per_axis)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n_per_axis {
                for k in 0..n_per_axis {
                    let x = Vec3::new(i as f64, j as f64, k as f64) * h;
                    s += field.velocity(&x, t).dot(&field.vorticity(&x, t));
                }
            }
            s
        })
        .collect();
    let value = crate::error::finite(slabs.iter().sum::<f64>() * h * h * h, "helicity")?;
    let volume = period.powi(3);
    Ok(HelicityReport {
        value,
        quadrature_points: n_per_axis,
        obstruction: value.abs() > OBSTRUCTION_THRESHOLD * volume,
    })
}

/// Resolution and tolerances for [`obstruction_report`].
#[derive(Clone, Debug)]
pub struct ObstructionSettings {
    pub t: f64,
    pub helicity_points: usize,
    pub grid: usize,
    pub seeds: usize,
    pub t_max: f64,
    pub integrator: IntegratorConfig,
    pub tolerance: f64,
}

impl Default for ObstructionSettings {
    fn default() -> Self {
        Self {
            t: 0.0,
            helicity_points: 64,
            grid: 8,
            seeds: 16,
            t_max: 1.0,
            integrator: IntegratorConfig {
                step: 1e-3,
                scheme: Default::default(),
                max_time: f64::INFINITY,
            },
            tolerance: 1e-6,
        }
    }
}

/// Verdict document for one (field, candidate) pair.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub field: String,
    pub candidate: Option<String>,
    pub material_residual: Option<f64>,
    pub factorization_residual: Option<f64>,
    pub gauge_residual: Option<f64>,
    pub clebsch8_residual: Option<f64>,
    pub helicity: f64,
    pub quadrature_points: usize,
    pub obstruction: bool,
    pub candidate_passes: Option<bool>,
    pub verdict: String,
}

/// Human-readable conclusion for a helicity result (absent on unbounded
/// domains) and an optional candidate outcome.
pub fn verdict(helicity: Option<&HelicityReport>, candidate_passes: Option<bool>) -> String {
    let candidate = match candidate_passes {
        Some(true) => "the candidate pair passes all checks",
        Some(false) => "the candidate pair fails at least one check",
        None => "existence of a global pair is not established",
    };
    match helicity {
        Some(h) if h.obstruction => format!(
            "nonzero helicity {:.6e}: no single Clebsch pair with a single-valued gauge function \
             exists globally on the periodic box",
            h.value
        ),
        Some(_) => format!("no obstruction detected; {candidate}"),
        None => format!("helicity obstruction not applicable on an unbounded domain; {candidate}"),
    }
}

pub fn obstruction_report<F: FlowField + ?Sized>(
    field: &F,
    cand: Option<&dyn ClebschCandidate>,
    settings: &ObstructionSettings,
) -> Result<ObstructionReport> {
    let h = helicity(field, settings.t, settings.helicity_points)?;
    let mut report = ObstructionReport {
        field: field.name().to_string(),
        candidate: cand.map(|c| c.name().to_string()),
        material_residual: None,
        factorization_residual: None,
        gauge_residual: None,
        clebsch8_residual: None,
        helicity: h.value,
        quadrature_points: h.quadrature_points,
        obstruction: h.obstruction,
        candidate_passes: None,
        verdict: String::new(),
    };
    if let Some(c) = cand {
        let (lo, hi) = field.domain().sample_box();
        let seeds = halton::halton_points(settings.seeds, &lo, &hi);
        let material =
            verify_material_invariance(c, field, &seeds, settings.t_max, &settings.integrator)?
                .max();
        let factor = verify_vorticity_factorization(c, field, settings.t, settings.grid)?;
        let gauge = verify_gauge_existence(c, field, settings.t, settings.grid)?;
        let clebsch8 = match clebsch8_identity_check(c, field, settings.t, settings.grid) {
            Ok(v) => Some(v),
            Err(Error::GaugeIllDefined { .. }) => None,
            Err(e) => return Err(e),
        };
        let tol = settings.tolerance;
        report.material_residual = Some(material);
        report.factorization_residual = Some(factor);
        report.gauge_residual = Some(gauge);
        report.clebsch8_residual = clebsch8;
        report.candidate_passes = Some(material <= tol && factor <= tol && gauge <= tol);
    }
    report.verdict = verdict(Some(&h), report.candidate_passes);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::*;
    use std::f64::consts::{PI, TAU};

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::rk4(1e-3).unwrap()
    }

    #[test]
    fn shear_material_pair_is_invariant() {
        let f = make_shear("sin").unwrap();
        let seeds = halton::halton_points(8, &Vec3::zeros(), &Vec3::repeat(TAU));
        let d = verify_material_invariance(&ShearMaterialPair, &f, &seeds, 2.0, &cfg()).unwrap();
        assert!(d.max() <= 1e-8, "{d:?}");
    }

    #[test]
    fn naive_pair_deviation_matches_closed_form() {
        let f = make_shear("sin").unwrap();
        let a = Vec3::new(1.2, 0.4, 2.0);
        let d = verify_material_invariance(&ShearNaivePair, &f, &[a], 1.0, &cfg()).unwrap();
        assert_eq!(d.phi, 0.0);
        assert!((d.psi - a[0].sin().abs()).abs() < 1e-10);
    }

    #[test]
    fn constant_pair_on_steady_field() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let c = ConstantPair {
            phi: 2.0,
            psi: -1.0,
        };
        let d =
            verify_material_invariance(&c, &f, &[Vec3::new(1.0, 2.0, 3.0)], 1.0, &cfg()).unwrap();
        assert_eq!(d.max(), 0.0);
    }

    #[test]
    fn analytic_psi_gradient_matches_fd() {
        let p = ShearMaterialPair;
        let x = Vec3::new(0.7, -1.1, 0.3);
        let fd = fd::gradient4(|y| p.psi(y, 1.5), &x, 1e-3);
        assert!((fd - p.psi_gradient(&x, 1.5).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn factorization_for_shear_pair() {
        let f = make_shear("sin").unwrap();
        assert!(verify_vorticity_factorization(&ShearMaterialPair, &f, 0.0, 8).unwrap() <= 1e-8);
        assert!(verify_vorticity_factorization(&ShearMaterialPair, &f, 2.0, 8).unwrap() <= 1e-6);
        let c = FnCandidate::new(
            "fd",
            |x, _| x[0],
            |x, t| x[0].cos() * (x[1] - t * x[0].sin()),
        );
        assert!(verify_vorticity_factorization(&c, &f, 2.0, 8).unwrap() <= 1e-6);
        let zero = verify_vorticity_factorization(&ConstantPair::default(), &f, 0.0, 8).unwrap();
        assert!(zero > 0.5);
        assert!(verify_vorticity_factorization(&ConstantPair::default(), &f, 0.0, 4).is_err());
    }

    #[test]
    fn gauge_existence_cases() {
        let shear = make_shear("sin").unwrap();
        assert!(verify_gauge_existence(&ShearMaterialPair, &shear, 0.0, 8).unwrap() <= 1e-8);
        let strain = make_linear_strain(1.0, 1.0, -2.0).unwrap();
        assert!(verify_gauge_existence(&ConstantPair::default(), &strain, 0.0, 8).unwrap() <= 1e-9);
        let rigid = make_rigid_rotation(1.0).unwrap();
        let r = verify_gauge_existence(&ConstantPair::default(), &rigid, 0.0, 8).unwrap();
        assert!((r - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gauge_function_of_strain() {
        let strain = make_linear_strain(1.0, 1.0, -2.0).unwrap();
        let x = Vec3::new(0.3, -0.6, 0.8);
        let f = gauge_function(&ConstantPair::default(), &strain, &x, 0.0);
        let exact = 0.5 * (x[0] * x[0] + x[1] * x[1] - 2.0 * x[2] * x[2]);
        assert!((f - exact).abs() < 1e-13);
    }

    #[test]
    fn clebsch8_cases() {
        let shear = make_shear("sin").unwrap();
        for t in [0.0, 1.0] {
            assert!(clebsch8_identity_check(&ShearMaterialPair, &shear, t, 8).unwrap() <= 1e-6);
        }
        let strain = make_linear_strain(1.0, 1.0, -2.0).unwrap();
        assert!(
            clebsch8_identity_check(&ConstantPair::default(), &strain, 0.0, 8).unwrap() <= 1e-8
        );
        let exp = make_free_expansion(1.0, BarotropicClosure::new(1.4, 1.0).unwrap()).unwrap();
        assert!(clebsch8_identity_check(&ConstantPair::default(), &exp, 0.5, 8).unwrap() <= 1e-8);
        let rigid = make_rigid_rotation(1.0).unwrap();
        assert!(matches!(
            clebsch8_identity_check(&ConstantPair::default(), &rigid, 0.0, 8),
            Err(Error::GaugeIllDefined { .. })
        ));
    }

    #[test]
    fn helicity_values() {
        let abc = make_abc(1.0, 1.0, 1.0).unwrap();
        let h = helicity(&abc, 0.0, 64).unwrap();
        assert!((h.value - 3.0 * TAU.powi(3)).abs() <= 1e-6 * h.value);
        assert!(h.obstruction);
        let ptg = make_planar_taylor_green();
        assert!(helicity(&ptg, 0.0, 32).unwrap().value.abs() <= 1e-10);
        let rigid = make_rigid_rotation(1.0).unwrap();
        assert!(matches!(
            helicity(&rigid, 0.0, 32),
            Err(Error::Unsupported(_))
        ));
        assert!(helicity(&abc, 0.0, 8).is_err());
    }

    #[test]
    fn helicity_scales_with_coefficients() {
        let abc = make_abc(0.5, 2.0, 1.0).unwrap();
        let h = helicity(&abc, 0.0, 32).unwrap();
        assert!((h.value - 5.25 * 8.0 * PI.powi(3)).abs() < 1e-9 * h.value);
    }

    #[test]
    fn reports() {
        let s = ObstructionSettings {
            helicity_points: 32,
            ..Default::default()
        };
        let abc = make_abc(1.0, 1.0, 1.0).unwrap();
        assert!(obstruction_report(&abc, None, &s).unwrap().obstruction);
        let shear = make_shear("sin").unwrap();
        let r = obstruction_report(&shear, Some(&ShearMaterialPair), &s).unwrap();
        assert!(!r.obstruction);
        assert_eq!(r.candidate_passes, Some(true));
        let ptg = make_planar_taylor_green();
        let r = obstruction_report(&ptg, None, &s).unwrap();
        assert!(!r.obstruction && r.verdict.contains("not established"));
    }
}
