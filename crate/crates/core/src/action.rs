//! Discrete barotropic action `S = Σ_a w_a ∫₀ᵀ [½|ẋ|² + Ω] dt` over a
//! label ensemble, its first variation, and the Euler–Lagrange residual
//! `ẍ − ∇Ω`.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::{pressure_work, FlowField};
use crate::flow_map::{advance, flow_map, position_increment, IntegratorConfig, TrajectoryState};
use crate::numerics::{fd, fit, quadrature};
use crate::{Error, Mat3, Result, Vec3};

/// Time step of the second difference used for `ẍ`.
pub const ACCELERATION_STEP: f64 = 1e-4;

/// Tolerance of the finite-difference check that velocities match positions.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-4;

/// Uniform label lattice of cell centres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub lo: Vec3,
    pub spacing: Vec3,
    pub dims: [usize; 3],
}

impl Lattice {
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.product()
    }
}

#[derive(Clone, Debug)]
pub struct ParticleEnsemble {
    labels: Vec<Vec3>,
    weights: Vec<f64>,
    lattice: Option<Lattice>,
}

impl ParticleEnsemble {
    /// Cell centres of an `n[0] × n[1] × n[2]` lattice over `[lo, hi]` with
    /// constant reference density `rho0`.
    pub fn lattice(lo: &Vec3, hi: &Vec3, n: [usize; 3], rho0: f64) -> Result<Self> {
        if n.iter().any(|&m| m < 3) {
            return Err(Error::param(
                "lattice",
                format!("needs at least 3 cells per axis, got {n:?}"),
            ));
        }
        if (0..3).any(|d| !(hi[d] > lo[d])) {
            return Err(Error::param("block", format!("empty block {lo:?}..{hi:?}")));
        }
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::param("rho0", format!("must be > 0, got {rho0}")));
        }
        let spacing = Vec3::new(
            (hi[0] - lo[0]) / n[0] as f64,
            (hi[1] - lo[1]) / n[1] as f64,
            (hi[2] - lo[2]) / n[2] as f64,
        );
        let lattice = Lattice {
            lo: *lo,
            spacing,
            dims: n,
        };
        let mut labels = Vec::with_capacity(n[0] * n[1] * n[2]);
        for i in 0..n[0] {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    let c = Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5);
                    labels.push(lo + c.component_mul(&spacing));
                }
            }
        }
        let w = rho0 * lattice.cell_volume();
        Ok(Self {
            weights: vec![w; labels.len()],
            labels,
            lattice: Some(lattice),
        })
    }

    /// Scattered labels with explicit positive weights.
    pub fn new(labels: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if labels.is_empty() || labels.len() != weights.len() {
            return Err(Error::param(
                "weights",
                format!("{} labels but {} weights", labels.len(), weights.len()),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::param("weights", "weights must be positive"));
        }
        let mut seen = HashSet::new();
        for a in &labels {
            if !seen.insert([a[0].to_bits(), a[1].to_bits(), a[2].to_bits()]) {
                return Err(Error::param("labels", format!("duplicate label {a:?}")));
            }
        }
        Ok(Self {
            labels,
            weights,
            lattice: None,
        })
    }

    pub fn labels(&self) -> &[Vec3] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lattice_info(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Positions and velocities of every label at uniformly spaced times
/// `0 = t₀ < … < t_K = T`.
#[derive(Clone, Debug)]
pub struct DiscreteTrajectory {
    times: Vec<f64>,
    positions: Vec<Vec<Vec3>>,
    velocities: Vec<Vec<Vec3>>,
    jacobians: Option<Vec<Vec<Mat3>>>,
}

fn uniform_times(horizon: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::param(
            "steps",
            format!("needs at least 2 time steps, got {steps}"),
        ));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(
            "horizon",
            format!("must be > 0, got {horizon}"),
        ));
    }
    Ok((0..=steps)
        .map(|k| horizon * k as f64 / steps as f64)
        .collect())
}

impl DiscreteTrajectory {
    /// Integrates every label of `ens` through `[0, horizon]`, sampling at
    /// `steps + 1` uniform times.
    pub fn integrate<F: FlowField + ?Sized>(
        field: &F,
        ens: &ParticleEnsemble,
        horizon: f64,
        steps: usize,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        let times = uniform_times(horizon, steps)?;
        let sub = IntegratorConfig {
            step: cfg.step.min(horizon / steps as f64),
            ..*cfg
        };
        let per_label = ens
            .labels
            .par_iter()
            .map(|a| {
                let mut state = TrajectoryState::initial(*a);
                let mut out = Vec::with_capacity(times.len());
                out.push(state);
                for &t in &times[1..] {
                    state = advance(&state, field, &sub, t - state.time)?;
                    out.push(state);
                }
                Ok(out)
            })
            .collect::<Result<Vec<Vec<TrajectoryState>>>>()?;
        let positions = per_label
            .iter()
            .map(|s| s.iter().map(|st| st.position).collect())
            .collect();
        let velocities = per_label
            .iter()
            .map(|s| {
                s.iter()
                    .map(|st| field.velocity(&st.position, st.time))
                    .collect()
            })
            .collect();
        let jacobians = per_label
            .iter()
            .map(|s| s.iter().map(|st| st.jacobian).collect())
            .collect();
        Ok(Self {
            times,
            positions,
            velocities,
            jacobians: Some(jacobians),
        })
    }

    /// Prescribed trajectories `x = position(a, t)` with `ẋ = velocity(a, t)`.
    pub fn from_fn<P, V>(
        ens: &ParticleEnsemble,
        horizon: f64,
        steps: usize,
        position: P,
        velocity: V,
    ) -> Result<Self>
    where
        P: Fn(&Vec3, f64) -> Vec3,
        V: Fn(&Vec3, f64) -> Vec3,
    {
        let times = uniform_times(horizon, steps)?;
        let positions = ens
            .labels
            .iter()
            .map(|a| times.iter().map(|&t| position(a, t)).collect())
            .collect();
        let velocities = ens
            .labels
            .iter()
            .map(|a| times.iter().map(|&t| velocity(a, t)).collect())
            .collect();
        Self::from_samples(times, positions, velocities)
    }

    pub fn from_samples(
        times: Vec<f64>,
        positions: Vec<Vec<Vec3>>,
        velocities: Vec<Vec<Vec3>>,
    ) -> Result<Self> {
        let k = times.len();
        if k < 3 || times[0] != 0.0 {
            return Err(Error::param(
                "times",
                "need at least 3 samples starting at t = 0",
            ));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0)
            || times
                .windows(2)
                .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt)
        {
            return Err(Error::param(
                "times",
                "sample times must be uniformly spaced",
            ));
        }
        if positions.len() != velocities.len()
            || positions.iter().chain(&velocities).any(|s| s.len() != k)
        {
            return Err(Error::param(
                "positions",
                "every label needs one sample per time",
            ));
        }
        Ok(Self {
            times,
            positions,
            velocities,
            jacobians: None,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("at least 3 samples")
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn positions(&self) -> &[Vec<Vec3>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<Vec3>] {
        &self.velocities
    }

    pub fn jacobians(&self) -> Option<&[Vec<Mat3>]> {
        self.jacobians.as_deref()
    }

    /// Max over samples of `|D_t x − ẋ| / max(1, |ẋ|)` with 2nd-order
    /// differences `D_t`.
    pub fn velocity_consistency(&self) -> f64 {
        let dt = self.step();
        self.positions
            .iter()
            .zip(&self.velocities)
            .flat_map(|(x, v)| {
                let d = fd::open_derivative2(x, dt);
                d.into_iter()
                    .zip(v.iter())
                    .map(|(dx, vk)| (dx - vk).norm() / vk.norm().max(1.0))
                    .collect::<Vec<f64>>()
            })
            .fold(0.0, f64::max)
    }

    fn check_consistency(&self) -> Result<()> {
        let c = self.velocity_consistency();
        if !(c <= CONSISTENCY_TOLERANCE) {
            return Err(Error::Constraint(format!(
                "velocities disagree with positions by {c:e} (tolerance {CONSISTENCY_TOLERANCE:e})"
            )));
        }
        Ok(())
    }

    fn check_shape(&self, ens: &ParticleEnsemble) -> Result<()> {
        if self.positions.len() != ens.len() {
            return Err(Error::param(
                "trajectory",
                format!(
                    "{} trajectories for {} labels",
                    self.positions.len(),
                    ens.len()
                ),
            ));
        }
        Ok(())
    }

    /// `x + ε δx`, `ẋ + ε δẋ`.
    pub fn perturbed<P: Perturbation + ?Sized>(
        &self,
        ens: &ParticleEnsemble,
        pert: &P,
        eps: f64,
    ) -> DiscreteTrajectory {
        let shift = |samples: &[Vec<Vec3>], f: &dyn Fn(&Vec3, f64) -> Vec3| -> Vec<Vec<Vec3>> {
            samples
                .iter()
                .zip(&ens.labels)
                .map(|(xs, a)| {
                    xs.iter()
                        .zip(&self.times)
                        .map(|(x, &t)| x + f(a, t) * eps)
                        .collect()
                })
                .collect()
        };
        DiscreteTrajectory {
            times: self.times.clone(),
            positions: shift(&self.positions, &|a, t| pert.displacement(a, t)),
            velocities: shift(&self.velocities, &|a, t| pert.rate(a, t)),
            jacobians: None,
        }
    }
}

/// How the potential `Ω` is evaluated along (possibly varied) trajectories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialModel {
    /// `Ω = V − f(p)` read from the Eulerian field at the particle position.
    #[default]
    Frozen,
    /// `Ω = V − e(ρ)` with `ρ = ρ₀ / det J` from label-lattice differences of
    /// the trajectory itself, so variations change the density too.
    Elastic,
}

/// `Ω = V − f(p)`; for incompressible fields `f(p) = p/ρ`.
pub fn omega_potential<F: FlowField + ?Sized>(field: &F, x: &Vec3, t: f64) -> Result<f64> {
    Ok(field.force_potential(x, t) - pressure_work(field, x, t)?)
}

fn grad_omega<F: FlowField + ?Sized>(field: &F, x: &Vec3, t: f64) -> Result<Vec3> {
    omega_potential(field, x, t)?;
    let g = fd::gradient4(
        |y| omega_potential(field, y, t).unwrap_or(f64::NAN),
        x,
        fd::DEFAULT_STEP,
    );
    crate::error::finite_vec(g, "potential gradient")
}

/// Lattice Jacobians `∂x/∂a` at time index `k` by 2nd-order differences.
fn lattice_jacobians(lat: &Lattice, positions: &[Vec<Vec3>], k: usize) -> Vec<Mat3> {
    let [n0, n1, n2] = lat.dims;
    let mut jac = vec![Mat3::zeros(); n0 * n1 * n2];
    let mut line = |axis: usize, idx: &dyn Fn(usize) -> usize, len: usize| {
        let xs: Vec<Vec3> = (0..len).map(|m| positions[idx(m)][k]).collect();
        for (m, d) in fd::open_derivative2(&xs, lat.spacing[axis])
            .into_iter()
            .enumerate()
        {
            jac[idx(m)].set_column(axis, &d);
        }
    };
    for j in 0..n1 {
        for l in 0..n2 {
            line(0, &|m| lat.index(m, j, l), n0);
        }
    }
    for i in 0..n0 {
        for l in 0..n2 {
            line(1, &|m| lat.index(i, m, l), n1);
        }
    }
    for i in 0..n0 {
        for j in 0..n1 {
            line(2, &|m| lat.index(i, j, m), n2);
        }
    }
    jac
}

/// Trapezoid-in-time, weighted-sum-over-labels action.
pub fn discrete_action<F: FlowField + ?Sized>(
    ens: &ParticleEnsemble,
    traj: &DiscreteTrajectory,
    field: &F,
    model: PotentialModel,
) -> Result<f64> {
    if field.closure().is_none() {
        return Err(Error::Unsupported(format!(
            "the action is defined for barotropic fields only; `{}` has no closure",
            field.name()
        )));
    }
    traj.check_shape(ens)?;
    traj.check_consistency()?;
    let wt = quadrature::trapezoid_weights(traj.times.len(), traj.step());
    let kinetic: Vec<f64> = traj
        .velocities
        .par_iter()
        .map(|v| {
            v.iter()
                .zip(&wt)
                .map(|(vk, w)| w * 0.5 * vk.norm_squared())
                .sum()
        })
        .collect();
    let potential: Vec<f64> = match model {
        PotentialModel::Frozen => traj
            .positions
            .par_iter()
            .map(|xs| {
                xs.iter()
                    .zip(traj.times.iter().zip(&wt))
                    .map(|(x, (&t, w))| Ok(w * omega_potential(field, x, t)?))
                    .sum::<Result<f64>>()
            })
            .collect::<Result<Vec<f64>>>()?,
        PotentialModel::Elastic => elastic_potential(ens, traj, field, &wt)?,
    };
    let s: f64 = ens
        .weights
        .iter()
        .zip(kinetic.iter().zip(&potential))
        .map(|(w, (k, p))| w * (k + p))
        .sum();
    crate::error::finite(s, "action")
}

/// Per-label `∫ (V − e(ρ)) dt` with the density taken from the trajectory.
fn elastic_potential<F: FlowField + ?Sized>(
    ens: &ParticleEnsemble,
    traj: &DiscreteTrajectory,
    field: &F,
    wt: &[f64],
) -> Result<Vec<f64>> {
    let lat = ens.lattice.as_ref().ok_or_else(|| {
        Error::Unsupported("the elastic potential needs a lattice ensemble".into())
    })?;
    let closure = *field.closure().expect("checked by caller");
    let rho0: Vec<f64> = ens.weights.iter().map(|w| w / lat.cell_volume()).collect();
    let per_time = (0..traj.times.len())
        .into_par_iter()
        .map(|k| {
            let t = traj.times[k];
            lattice_jacobians(lat, &traj.positions, k)
                .iter()
                .enumerate()
                .map(|(a, j)| {
                    let det = j.determinant();
                    if !(det > 0.0) {
                        return Err(Error::Constraint(format!(
                            "varied trajectory folds: det J = {det:e} at t = {t}"
                        )));
                    }
                    let x = traj.positions[a][k];
                    Ok(field.force_potential(&x, t) - closure.internal_energy(rho0[a] / det)?)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((0..ens.len())
        .map(|a| per_time.iter().zip(wt).map(|(col, w)| w * col[a]).sum())
        .collect())
}

/// Frozen-potential action evaluated with the Eulerian measure `ρ d³x` on
/// the mapped block, using `d³x = det J d³a`.
pub fn eulerian_measure_action<F: FlowField + ?Sized>(
    ens: &ParticleEnsemble,
    traj: &DiscreteTrajectory,
    field: &F,
) -> Result<f64> {
    traj.check_shape(ens)?;
    let jac = traj.jacobians().ok_or_else(|| {
        Error::Unsupported("the Eulerian measure needs integrated trajectories".into())
    })?;
    let wt = quadrature::trapezoid_weights(traj.times.len(), traj.step());
    let per_label = ens
        .labels
        .par_iter()
        .enumerate()
        .map(|(a, label)| {
            let cell = ens.weights[a] / field.density(label, 0.0);
            let mut s = 0.0;
            for (k, (&t, w)) in traj.times.iter().zip(&wt).enumerate() {
                let x = traj.positions[a][k];
                let lag =
                    0.5 * field.velocity(&x, t).norm_squared() + omega_potential(field, &x, t)?;
                s += w * field.density(&x, t) * jac[a][k].determinant() * lag;
            }
            Ok(cell * s)
        })
        .collect::<Result<Vec<f64>>>()?;
    crate::error::finite(per_label.iter().sum(), "action")
}

/// `ẍ − ∇Ω` at `(x, t)`, with `ẍ` from two RK4 increments of `±δ`.
pub fn euler_lagrange_residual_at<F: FlowField + ?Sized>(
    field: &F,
    x: &Vec3,
    t: f64,
) -> Result<Vec3> {
    let d = ACCELERATION_STEP;
    for s in [t - d, t + d] {
        if !field.valid_time(s) {
            return Err(Error::TimeOutOfDomain {
                field: field.name().to_string(),
                t: s,
            });
        }
    }
    let acc = (position_increment(field, x, t, d) + position_increment(field, x, t, -d)) / (d * d);
    crate::error::finite_vec(acc - grad_omega(field, x, t)?, "Euler-Lagrange residual")
}

/// `ẍ − ∇Ω` along the trajectory of label `a` at time `t`.
pub fn euler_lagrange_residual<F: FlowField + ?Sized>(
    field: &F,
    a: &Vec3,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec3> {
    let x = flow_map(field, a, t, cfg)?.position;
    euler_lagrange_residual_at(field, &x, t)
}

/// `ẍ − ∇Ω` at every sample of a prescribed trajectory, with `ẍ` from
/// 2nd-order differences of the sampled velocities.
pub fn trajectory_residual<F: FlowField + ?Sized>(
    traj: &DiscreteTrajectory,
    field: &F,
) -> Result<Vec<Vec<Vec3>>> {
    let dt = traj.step();
    traj.positions
        .par_iter()
        .zip(&traj.velocities)
        .map(|(xs, vs)| {
            fd::open_derivative2(vs, dt)
                .into_iter()
                .zip(xs.iter().zip(&traj.times))
                .map(|(acc, (x, &t))| Ok(acc - grad_omega(field, x, t)?))
                .collect()
        })
        .collect()
}

/// Residual `ẍ − ∇Ω` at every sample of an integrated trajectory.
pub fn sampled_residual<F: FlowField + ?Sized>(
    traj: &DiscreteTrajectory,
    field: &F,
) -> Result<Vec<Vec<Vec3>>> {
    traj.positions
        .par_iter()
        .map(|xs| {
            xs.iter()
                .zip(&traj.times)
                .map(|(x, &t)| euler_lagrange_residual_at(field, x, t))
                .collect()
        })
        .collect()
}

/// Admissible variation `δx(a, t)`, vanishing at `t = 0` and `t = T`.
pub trait Perturbation: Sync {
    fn displacement(&self, a: &Vec3, t: f64) -> Vec3;

    /// `∂δx/∂t`.
    fn rate(&self, a: &Vec3, t: f64) -> Vec3;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroPerturbation;

impl Perturbation for ZeroPerturbation {
    fn displacement(&self, _a: &Vec3, _t: f64) -> Vec3 {
        Vec3::zeros()
    }
    fn rate(&self, _a: &Vec3, _t: f64) -> Vec3 {
        Vec3::zeros()
    }
}

/// `sin²(πt/T) · e · Π_j g_j(a_j)` where each `g_j` is a windowed cosine
/// supported strictly inside the label block.
#[derive(Clone, Debug)]
pub struct BumpPerturbation {
    direction: Vec3,
    lo: Vec3,
    hi: Vec3,
    horizon: f64,
    modes: [(f64, f64); 3],
}

/// Fraction of the block left untouched at each face. On lattices with at
/// least 12 cells per axis this keeps the three outer layers, which feed the
/// one-sided lattice stencils, unperturbed.
const MARGIN: f64 = 0.25;

impl BumpPerturbation {
    pub fn new(
        direction: Vec3,
        lo: Vec3,
        hi: Vec3,
        horizon: f64,
        modes: [(f64, f64); 3],
    ) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::param("direction", "must be a nonzero vector"));
        }
        if (0..3).any(|d| !(hi[d] > lo[d])) || !(horizon > 0.0) {
            return Err(Error::param("block", "empty block or horizon"));
        }
        Ok(Self {
            direction: direction / n,
            lo,
            hi,
            horizon,
            modes,
        })
    }

    /// Random unit direction, wavenumbers in `{1, 2, 3}` and phases.
    pub fn random(seed: u64, lo: Vec3, hi: Vec3, horizon: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: f64 = rng.gen_range(-1.0..1.0);
        let theta: f64 = rng.gen_range(0.0..TAU);
        let r = (1.0 - z * z).sqrt();
        let direction = Vec3::new(r * theta.cos(), r * theta.sin(), z);
        let mut modes = [(0.0, 0.0); 3];
        for m in &mut modes {
            *m = (rng.gen_range(1..=3) as f64, rng.gen_range(0.0..TAU));
        }
        Self::new(direction, lo, hi, horizon, modes)
    }

    /// Window along one axis.
    fn profile(&self, axis: usize, a: f64) -> f64 {
        let u = (a - self.lo[axis]) / (self.hi[axis] - self.lo[axis]);
        let s = (u - MARGIN) / (1.0 - 2.0 * MARGIN);
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        let (k, phase) = self.modes[axis];
        (PI * s).sin().powi(2) * (PI * k * s + phase).cos()
    }

    fn spatial(&self, a: &Vec3) -> Vec3 {
        self.direction * (0..3).map(|d| self.profile(d, a[d])).product::<f64>()
    }
}

impl Perturbation for BumpPerturbation {
    fn displacement(&self, a: &Vec3, t: f64) -> Vec3 {
        self.spatial(a) * (PI * t / self.horizon).sin().powi(2)
    }

    fn rate(&self, a: &Vec3, t: f64) -> Vec3 {
        self.spatial(a) * (PI / self.horizon * (TAU * t / self.horizon).sin())
    }
}

/// `[S(x + εδx) − S(x − εδx)] / 2ε`.
pub fn first_variation<F, P>(
    ens: &ParticleEnsemble,
    traj: &DiscreteTrajectory,
    field: &F,
    pert: &P,
    eps: f64,
    model: PotentialModel,
) -> Result<f64>
where
    F: FlowField + ?Sized,
    P: Perturbation + ?Sized,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("epsilon", format!("must be > 0, got {eps}")));
    }
    traj.check_shape(ens)?;
    let plus = discrete_action(ens, &traj.perturbed(ens, pert, eps), field, model)?;
    let minus = discrete_action(ens, &traj.perturbed(ens, pert, -eps), field, model)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// `Σ_a w_a ∫ r(a, t)·δx(a, t) dt` for sampled residuals `r`.
pub fn weak_form<P: Perturbation + ?Sized>(
    ens: &ParticleEnsemble,
    traj: &DiscreteTrajectory,
    residual: &[Vec<Vec3>],
    pert: &P,
) -> f64 {
    let wt = quadrature::trapezoid_weights(traj.times.len(), traj.step());
    ens.labels
        .iter()
        .zip(&ens.weights)
        .zip(residual)
        .map(|((a, w), r)| {
            w * r
                .iter()
                .zip(traj.times.iter().zip(&wt))
                .map(|(rk, (&t, wk))| wk * rk.dot(&pert.displacement(a, t)))
                .sum::<f64>()
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct ActionSettings {
    pub lo: Vec3,
    pub hi: Vec3,
    pub lattice: usize,
    pub steps: usize,
    pub horizon: f64,
    pub epsilons: Vec<f64>,
    pub perturbations: usize,
    pub seed: u64,
    pub model: PotentialModel,
}

impl Default for ActionSettings {
    fn default() -> Self {
        Self {
            lo: Vec3::repeat(0.5),
            hi: Vec3::repeat(1.5),
            lattice: 12,
            steps: 200,
            horizon: 1.0,
            epsilons: vec![1e-2, 5e-3, 2.5e-3],
            perturbations: 5,
            seed: 7,
            model: PotentialModel::Elastic,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionReport {
    pub action_value: f64,
    /// One `(ε, δS)` list per random perturbation.
    pub first_variation_by_epsilon: Vec<Vec<(f64, f64)>>,
    pub observed_orders: Vec<f64>,
    /// The observed order farthest from 2.
    pub observed_order: f64,
    pub el_residual_max: f64,
    /// `|⟨ẍ − ∇Ω, δx⟩ + δS|` for the frozen potential, worst perturbation.
    pub weak_strong_gap: f64,
}

/// Integrates the field's own trajectories over a label block and measures
/// stationarity of the action under random perturbations.
pub fn action_report<F: FlowField + ?Sized>(
    field: &F,
    settings: &ActionSettings,
    cfg: &IntegratorConfig,
) -> Result<ActionReport> {
    let n = settings.lattice;
    let ens = ParticleEnsemble::lattice(&settings.lo, &settings.hi, [n, n, n], 1.0)?;
    let traj = DiscreteTrajectory::integrate(field, &ens, settings.horizon, settings.steps, cfg)?;
    let action_value = discrete_action(&ens, &traj, field, settings.model)?;
    let residual = sampled_residual(&traj, field)?;
    let el_residual_max = residual
        .iter()
        .flatten()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    let mut by_eps = Vec::with_capacity(settings.perturbations);
    let mut orders = Vec::with_capacity(settings.perturbations);
    let mut gap: f64 = 0.0;
    for p in 0..settings.perturbations {
        let pert = BumpPerturbation::random(
            settings.seed.wrapping_add(p as u64),
            settings.lo,
            settings.hi,
            settings.horizon,
        )?;
        let series = settings
            .epsilons
            .iter()
            .map(|&e| {
                Ok((
                    e,
                    first_variation(&ens, &traj, field, &pert, e, settings.model)?,
                ))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let (eps, vals): (Vec<f64>, Vec<f64>) = series.iter().map(|(e, v)| (*e, v.abs())).unzip();
        orders.push(fit::log_log_slope(&eps, &vals).unwrap_or(f64::NAN));
        by_eps.push(series);
        let smallest = settings
            .epsilons
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smallest.is_finite() {
            let frozen =
                first_variation(&ens, &traj, field, &pert, smallest, PotentialModel::Frozen)?;
            gap = gap.max((weak_form(&ens, &traj, &residual, &pert) + frozen).abs());
        }
    }
    let observed_order = orders.iter().cloned().fold(f64::NAN, |worst, o| {
        if worst.is_nan() || (o - 2.0).abs() > (worst - 2.0).abs() {
            o
        } else {
            worst
        }
    });
    Ok(ActionReport {
        action_value,
        first_variation_by_epsilon: by_eps,
        observed_orders: orders,
        observed_order,
        el_residual_max,
        weak_strong_gap: gap,
    })
}
