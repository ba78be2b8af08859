//! Particle characteristics `ẋ = u(x, t)` integrated jointly with the tangent
//! flow `J̇ = (∇u) J`, giving the Lagrangian map `a ↦ x(a, t)`, its Jacobian
//! `∂x/∂a` and its inverse.

use serde::{Deserialize, Serialize};

use crate::field::FlowField;
use crate::{Error, Mat3, Result, Vec3};

/// Position and Jacobian of one fluid particle at time `time`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryState {
    /// Lagrangian label (initial position).
    pub label: Vec3,
    pub position: Vec3,
    /// `jacobian[(i, j)] = ∂x_i/∂a_j`.
    pub jacobian: Mat3,
    pub time: f64,
}

impl TrajectoryState {
    /// State at `t = 0`: `x = a`, `J = I`.
    pub fn initial(label: Vec3) -> Self {
        Self {
            label,
            position: label,
            jacobian: Mat3::identity(),
            time: 0.0,
        }
    }

    pub fn det_jacobian(&self) -> f64 {
        self.jacobian.determinant()
    }

    fn is_finite(&self) -> bool {
        self.position
            .iter()
            .chain(self.jacobian.iter())
            .all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Rk4,
}

/// Fixed-step integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub scheme: Scheme,
    pub max_time: f64,
}

impl IntegratorConfig {
    pub fn new(step: f64, max_time: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("h", format!("step must be > 0, got {step}")));
        }
        if !(max_time >= step) {
            return Err(Error::param(
                "t_max",
                format!("must be at least the step {step}, got {max_time}"),
            ));
        }
        Ok(Self {
            step,
            scheme: Scheme::Rk4,
            max_time,
        })
    }

    /// RK4 with the given step and no time horizon.
    pub fn rk4(step: f64) -> Result<Self> {
        Self::new(step, f64::INFINITY)
    }
}

type Stage = (Vec3, Mat3);

fn stage<F: FlowField + ?Sized>(field: &F, x: &Vec3, j: &Mat3, t: f64) -> Stage {
    (field.velocity(x, t), field.gradient(x, t) * j)
}

/// One classical RK4 step of the coupled `(x, J)` system.
fn rk4_step<F: FlowField + ?Sized>(field: &F, x: &Vec3, j: &Mat3, t: f64, h: f64) -> Stage {
    let half = 0.5 * h;
    let (k1x, k1j) = stage(field, x, j, t);
    let (k2x, k2j) = stage(field, &(x + k1x * half), &(j + k1j * half), t + half);
    let (k3x, k3j) = stage(field, &(x + k2x * half), &(j + k2j * half), t + half);
    let (k4x, k4j) = stage(field, &(x + k3x * h), &(j + k3j * h), t + h);
    let sixth = h / 6.0;
    (
        x + (k1x + (k2x + k3x) * 2.0 + k4x) * sixth,
        j + (k1j + (k2j + k3j) * 2.0 + k4j) * sixth,
    )
}

/// RK4 increment `x(t+h) − x(t)` of the position alone (`h` may be negative).
///
/// The increment is returned rather than the new position so that callers
/// differencing nearby times keep full relative precision.
pub fn position_increment<F: FlowField + ?Sized>(field: &F, x: &Vec3, t: f64, h: f64) -> Vec3 {
    let half = 0.5 * h;
    let k1 = field.velocity(x, t);
    let k2 = field.velocity(&(x + k1 * half), t + half);
    let k3 = field.velocity(&(x + k2 * half), t + half);
    let k4 = field.velocity(&(x + k3 * h), t + h);
    (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

/// Splits `span ≥ 0` into whole steps of `h` plus a final partial step.
pub(crate) fn step_plan(span: f64, h: f64) -> (u64, f64) {
    let ratio = span / h;
    let mut whole = ratio.floor();
    let mut rem = span - whole * h;
    if rem > h * (1.0 - 1e-9) {
        whole += 1.0;
        rem = span - whole * h;
    }
    if rem.abs() <= 1e-9 * h {
        rem = 0.0;
    }
    (whole as u64, rem)
}

fn check_time<F: FlowField + ?Sized>(field: &F, t: f64) -> Result<()> {
    if field.valid_time(t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfDomain {
            field: field.name().to_string(),
            t,
        })
    }
}

/// Advances `state` by `dt ≥ 0` using steps of `cfg.step` (the last step may
/// be shorter).
pub fn advance<F: FlowField + ?Sized>(
    state: &TrajectoryState,
    field: &F,
    cfg: &IntegratorConfig,
    dt: f64,
) -> Result<TrajectoryState> {
    if !(dt >= 0.0) {
        return Err(Error::param(
            "dt",
            format!("must be non-negative, got {dt}"),
        ));
    }
    if dt == 0.0 {
        return Ok(*state);
    }
    let h = cfg.step;
    let t0 = state.time;
    let t_end = t0 + dt;
    check_time(field, t0)?;
    check_time(field, t_end)?;
    let (whole, rem) = step_plan(dt, h);
    let mut x = state.position;
    let mut j = state.jacobian;
    for k in 0..whole {
        let t = t0 + k as f64 * h;
        let step = if k + 1 == whole && rem == 0.0 {
            t_end - t
        } else {
            h
        };
        (x, j) = rk4_step(field, &x, &j, t, step);
    }
    if rem > 0.0 {
        let t = t0 + whole as f64 * h;
        (x, j) = rk4_step(field, &x, &j, t, t_end - t);
    }
    let next = TrajectoryState {
        label: state.label,
        position: x,
        jacobian: j,
        time: t_end,
    };
    if !next.is_finite() {
        return Err(Error::NonFinite(format!(
            "trajectory of label {:?} between t={t0} and t={t_end}",
            state.label
        )));
    }
    Ok(next)
}

fn check_horizon(cfg: &IntegratorConfig, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::param("t", format!("must be non-negative, got {t}")));
    }
    if t > cfg.max_time * (1.0 + 1e-12) {
        return Err(Error::param(
            "t",
            format!(
                "{t} exceeds the integrator horizon t_max = {}",
                cfg.max_time
            ),
        ));
    }
    Ok(())
}

/// Lagrangian map: the state reached at time `t` from label `a` at time 0.
pub fn flow_map<F: FlowField + ?Sized>(
    field: &F,
    a: &Vec3,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryState> {
    check_horizon(cfg, t)?;
    advance(&TrajectoryState::initial(*a), field, cfg, t)
}

/// States of one trajectory at ascending `times`, computed in a single
/// forward pass.
pub fn sample_trajectory<F: FlowField + ?Sized>(
    field: &F,
    a: &Vec3,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<TrajectoryState>> {
    let mut out = Vec::with_capacity(times.len());
    let mut state = TrajectoryState::initial(*a);
    for &t in times {
        check_horizon(cfg, t)?;
        if t < state.time {
            return Err(Error::param("times", "sample times must be ascending"));
        }
        state = advance(&state, field, cfg, t - state.time)?;
        out.push(state);
    }
    Ok(out)
}

/// Label `a` with `x(a, t) ≈ x`, by integrating the characteristic backward
/// from `(x, t)` to time 0.
pub fn inverse_map<F: FlowField + ?Sized>(
    field: &F,
    x: &Vec3,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec3> {
    check_horizon(cfg, t)?;
    check_time(field, t)?;
    check_time(field, 0.0)?;
    let h = cfg.step;
    let (whole, rem) = step_plan(t, h);
    let mut pos = *x;
    let mut time = t;
    for k in 0..whole {
        let step = if k + 1 == whole && rem == 0.0 {
            time
        } else {
            h
        };
        pos += position_increment(field, &pos, time, -step);
        time = t - (k + 1) as f64 * h;
    }
    if rem > 0.0 {
        pos += position_increment(field, &pos, rem, -rem);
    }
    if pos.iter().all(|c| c.is_finite()) {
        Ok(pos)
    } else {
        Err(Error::NonFinite(format!(
            "backward trajectory from {x:?} at t={t}"
        )))
    }
}

/// `|det J − ρ₀(a)/ρ(x, t)|` along the trajectory of `a`.
pub fn mass_conservation_check<F: FlowField + ?Sized>(
    field: &F,
    a: &Vec3,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let state = flow_map(field, a, t, cfg)?;
    mass_deviation(field, &state)
}

/// Mass-conservation defect of an already integrated state.
pub fn mass_deviation<F: FlowField + ?Sized>(field: &F, state: &TrajectoryState) -> Result<f64> {
    let rho0 = field.density(&state.label, 0.0);
    let rho = field.density(&state.position, state.time);
    if !(rho > 0.0 && rho0 > 0.0) {
        return Err(Error::NonFinite(format!(
            "non-positive density (rho0 = {rho0}, rho = {rho})"
        )));
    }
    Ok((state.det_jacobian() - rho0 / rho).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::*;
    use std::f64::consts::{E, FRAC_PI_2};

    fn cfg(h: f64) -> IntegratorConfig {
        IntegratorConfig::rk4(h).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0).is_err());
        assert!(IntegratorConfig::new(-1e-3, 1.0).is_err());
        assert!(IntegratorConfig::new(0.1, 0.01).is_err());
        assert!(IntegratorConfig::new(1e-3, 5.0).is_ok());
    }

    #[test]
    fn step_plan_handles_roundoff() {
        assert_eq!(step_plan(1.0, 1e-3), (1000, 0.0));
        assert_eq!(step_plan(0.3, 0.1), (3, 0.0));
        let (n, r) = step_plan(0.25, 0.1);
        assert_eq!(n, 2);
        assert!((r - 0.05).abs() < 1e-15);
    }

    #[test]
    fn strain_closed_form() {
        let f = make_linear_strain(1.0, 1.0, -2.0).unwrap();
        let s = flow_map(&f, &Vec3::repeat(1.0), 1.0, &cfg(1e-3)).unwrap();
        let ex = Vec3::new(E, E, E.powi(-2));
        assert!((s.position - ex).norm() < 1e-8);
        assert!((s.jacobian - Mat3::from_diagonal(&ex)).norm() < 1e-8);
        assert!((s.det_jacobian() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shear_closed_form() {
        let f = make_shear("sin").unwrap();
        let a = Vec3::new(0.7, -0.2, 1.5);
        for t in [0.5, 2.0, 3.3] {
            let s = flow_map(&f, &a, t, &cfg(1e-3)).unwrap();
            let ex = Vec3::new(a[0], a[1] + t * a[0].sin(), a[2]);
            assert!((s.position - ex).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn zero_dt_is_identity() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let s = TrajectoryState::initial(Vec3::new(0.1, 0.2, 0.3));
        assert_eq!(advance(&s, &f, &cfg(1e-3), 0.0).unwrap(), s);
        let s0 = flow_map(&f, &s.label, 0.0, &cfg(1e-3)).unwrap();
        assert_eq!(s0.position, s.label);
        assert_eq!(s0.jacobian, Mat3::identity());
    }

    #[test]
    fn negative_dt_rejected() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let s = TrajectoryState::initial(Vec3::zeros());
        assert!(advance(&s, &f, &cfg(1e-3), -0.1).is_err());
    }

    #[test]
    fn rigid_quarter_turn() {
        let f = make_rigid_rotation(1.0).unwrap();
        let s = flow_map(&f, &Vec3::x(), FRAC_PI_2, &cfg(1e-3)).unwrap();
        assert!((s.position - Vec3::y()).norm() < 1e-8);
    }

    #[test]
    fn abc_first_step_taylor() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let h = 1e-3;
        let s = flow_map(&f, &Vec3::zeros(), h, &cfg(h)).unwrap();
        let lin = Vec3::repeat(h);
        // second-order term: h²/2 (∇u)u at the origin; only bound its size
        assert!((s.position - lin).norm() < 2.0 * h * h);
    }

    #[test]
    fn inverse_map_round_trip() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let c = cfg(1e-3);
        let a = Vec3::new(1.0, 2.0, 3.0);
        let s = flow_map(&f, &a, 2.0, &c).unwrap();
        assert!((inverse_map(&f, &s.position, 2.0, &c).unwrap() - a).norm() < 1e-6);
        assert_eq!(inverse_map(&f, &a, 0.0, &c).unwrap(), a);
    }

    #[test]
    fn rigid_inverse_is_reverse_rotation() {
        let f = make_rigid_rotation(1.0).unwrap();
        let x = Vec3::new(0.0, 1.0, 0.5);
        let a = inverse_map(&f, &x, FRAC_PI_2, &cfg(1e-3)).unwrap();
        assert!((a - Vec3::new(1.0, 0.0, 0.5)).norm() < 1e-8);
    }

    #[test]
    fn expansion_mass_conservation() {
        let c = BarotropicClosure::new(1.4, 1.0).unwrap();
        let f = make_free_expansion(1.0, c).unwrap();
        let a = Vec3::new(0.3, -0.4, 0.9);
        let s = flow_map(&f, &a, 1.0, &cfg(1e-3)).unwrap();
        assert!((s.det_jacobian() - 8.0).abs() < 1e-8);
        assert!(mass_conservation_check(&f, &a, 1.0, &cfg(1e-3)).unwrap() <= 1e-8);
        assert_eq!(
            mass_conservation_check(&f, &a, 0.0, &cfg(1e-3)).unwrap(),
            0.0
        );
    }

    #[test]
    fn horizon_and_domain_errors() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let c = IntegratorConfig::new(1e-2, 1.0).unwrap();
        assert!(flow_map(&f, &Vec3::zeros(), 2.0, &c).is_err());
        assert!(flow_map(&f, &Vec3::zeros(), -1.0, &c).is_err());
    }

    #[test]
    fn sample_trajectory_matches_flow_map() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let c = cfg(1e-3);
        let a = Vec3::new(0.5, 0.5, 0.5);
        let times = [0.0, 0.5, 1.25, 2.0];
        let states = sample_trajectory(&f, &a, &times, &c).unwrap();
        for (t, s) in times.iter().zip(&states) {
            let direct = flow_map(&f, &a, *t, &c).unwrap();
            assert!((direct.position - s.position).norm() < 1e-12);
            assert_eq!(s.time, *t);
        }
        assert!(sample_trajectory(&f, &a, &[1.0, 0.5], &c).is_err());
    }
}
