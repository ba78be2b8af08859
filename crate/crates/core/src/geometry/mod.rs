//! Material loops and surfaces advected by the flow, with circulation
//! (Kelvin), vorticity flux (Helmholtz) and Stokes-consistency checks.
//!
//! Geometry is represented by parametrized marker sets: loops by `N`
//! markers uniform in a periodic parameter `s ∈ [0, 1)`, surfaces by an
//! `N × M` marker grid over `(s, r) ∈ [0, 1]²`. Advection moves markers but
//! keeps their parameter values, so material geometry stays a smooth image
//! of the initial embedding.

mod material_loop;
mod surface;

use rayon::prelude::*;

pub use material_loop::{
    advect_loop, circulation, circulation_with, kelvin_series, refined_kelvin_series, MaterialLoop,
    Refinement,
};
pub use surface::{
    advect_surface, boundary_circulation, helmholtz_series, stokes_check, vorticity_flux,
    vorticity_flux_with, Boundary, MaterialSurface, SurfaceKind,
};

use crate::field::FlowField;
use crate::flow_map::{advance, IntegratorConfig, TrajectoryState};
use crate::{Error, Result, Vec3};

/// Minimum number of markers along any parameter direction.
pub const MIN_MARKERS: usize = 8;

/// How tangent vectors `∂x/∂s` are obtained along periodic parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TangentScheme {
    /// Fourier differentiation; spectrally accurate for smooth loops.
    #[default]
    Spectral,
    /// 4th-order centered differences.
    FourthOrder,
}

/// Where the vorticity on an advected surface comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VorticitySource {
    /// Eulerian curl of the field at the marker positions.
    #[default]
    Eulerian,
    /// Cauchy formula `J ω₀ / det J` from each marker's tangent flow.
    Cauchy,
}

/// Right-handed orthonormal frame `(e1, e2, n̂)` with `e1 × e2 = n̂`.
pub fn orthonormal_frame(normal: &Vec3) -> Result<(Vec3, Vec3, Vec3)> {
    let norm = normal.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::DegenerateGeometry(format!(
            "normal {normal:?} has no direction"
        )));
    }
    let n = normal / norm;
    let helper = if n[0].abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = (helper - n * helper.dot(&n)).normalize();
    let e2 = n.cross(&e1);
    Ok((e1, e2, n))
}

fn advect_states<F: FlowField + ?Sized>(
    states: &[TrajectoryState],
    field: &F,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<TrajectoryState>> {
    states
        .par_iter()
        .map(|s| {
            if t < s.time {
                return Err(Error::param(
                    "t",
                    format!("target time {t} precedes geometry time {}", s.time),
                ));
            }
            advance(s, field, cfg, t - s.time)
        })
        .collect()
}

fn check_synchronous(states: &[TrajectoryState]) -> Result<f64> {
    let t = states
        .first()
        .map(|s| s.time)
        .ok_or_else(|| Error::DegenerateGeometry("no markers".into()))?;
    if states.iter().any(|s| s.time != t) {
        return Err(Error::DegenerateGeometry(
            "markers are not synchronous".into(),
        ));
    }
    Ok(t)
}

fn check_series_times(times: &[f64], start: f64) -> Result<()> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < start) {
        return Err(Error::param(
            "times",
            format!("must be ascending and not before the geometry time {start}"),
        ));
    }
    Ok(())
}
