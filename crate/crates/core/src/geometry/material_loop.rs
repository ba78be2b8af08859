use std::f64::consts::TAU;

use super::{
    advect_states, check_series_times, check_synchronous, orthonormal_frame, TangentScheme,
    MIN_MARKERS,
};
use crate::field::FlowField;
use crate::flow_map::{IntegratorConfig, TrajectoryState};
use crate::numerics::{fd, spectral};
use crate::{Error, Result, Vec3};

/// Closed material curve sampled by markers uniform in `s ∈ [0, 1)`; the last
/// marker connects back to the first.
#[derive(Clone, Debug)]
pub struct MaterialLoop {
    markers: Vec<TrajectoryState>,
    time: f64,
}

impl MaterialLoop {
    /// Markers `curve(j/n)`, `j = 0..n`, at time 0. `curve` must be
    /// 1-periodic and smooth.
    pub fn from_curve<C: Fn(f64) -> Vec3>(curve: C, n: usize) -> Result<Self> {
        let markers = (0..n)
            .map(|j| TrajectoryState::initial(curve(j as f64 / n as f64)))
            .collect();
        Self::from_states(markers)
    }

    pub fn circle(center: &Vec3, radius: f64, normal: &Vec3, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateGeometry(format!("circle radius {radius}")));
        }
        let (e1, e2, _) = orthonormal_frame(normal)?;
        Self::from_curve(
            |s| {
                let (sn, cs) = (TAU * s).sin_cos();
                center + (e1 * cs + e2 * sn) * radius
            },
            n,
        )
    }

    pub fn from_states(markers: Vec<TrajectoryState>) -> Result<Self> {
        if markers.len() < MIN_MARKERS {
            return Err(Error::DegenerateGeometry(format!(
                "a loop needs at least {MIN_MARKERS} markers, got {}",
                markers.len()
            )));
        }
        let time = check_synchronous(&markers)?;
        Ok(Self { markers, time })
    }

    pub fn markers(&self) -> &[TrajectoryState] {
        &self.markers
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.markers.iter().map(|m| m.position).collect()
    }

    /// `dx/ds` at every marker.
    pub fn tangents(&self, scheme: TangentScheme) -> Vec<Vec3> {
        let pts = self.positions();
        match scheme {
            TangentScheme::Spectral => spectral::periodic_derivative(&pts, 1.0),
            TangentScheme::FourthOrder => fd::periodic_derivative4(&pts, 1.0 / pts.len() as f64),
        }
    }

    pub fn length(&self) -> f64 {
        let n = self.len() as f64;
        self.tangents(TangentScheme::Spectral)
            .iter()
            .map(|t| t.norm())
            .sum::<f64>()
            / n
    }

    /// Relative Fourier amplitude of the marker positions above a quarter
    /// of the sample count.
    pub fn spectral_tail(&self) -> f64 {
        spectral::spectral_tail(&self.positions())
    }

    /// `|∮ dx|` with centered-difference tangents relative to the loop
    /// length; zero for a closed, consistently ordered marker set.
    pub fn closure_residual(&self) -> f64 {
        let n = self.len() as f64;
        let total = self
            .tangents(TangentScheme::FourthOrder)
            .iter()
            .fold(Vec3::zeros(), |acc, t| acc + t)
            / n;
        total.norm() / self.length().max(f64::MIN_POSITIVE)
    }
}

pub fn advect_loop<F: FlowField + ?Sized>(
    lp: &MaterialLoop,
    field: &F,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<MaterialLoop> {
    let markers = advect_states(&lp.markers, field, t, cfg)?;
    Ok(MaterialLoop { markers, time: t })
}

/// `∮ u·dx` by the periodic trapezoid rule with spectral tangents.
pub fn circulation<F: FlowField + ?Sized>(lp: &MaterialLoop, field: &F) -> Result<f64> {
    circulation_with(lp, field, TangentScheme::Spectral)
}

pub fn circulation_with<F: FlowField + ?Sized>(
    lp: &MaterialLoop,
    field: &F,
    scheme: TangentScheme,
) -> Result<f64> {
    let tangents = lp.tangents(scheme);
    let n = lp.len() as f64;
    let sum: f64 = lp
        .markers
        .iter()
        .zip(&tangents)
        .map(|(m, d)| field.velocity(&m.position, lp.time).dot(d))
        .sum();
    crate::error::finite(sum / n, "circulation")
}

/// Circulation of the loop advected to each of the ascending `times`.
pub fn kelvin_series<F: FlowField + ?Sized>(
    lp: &MaterialLoop,
    field: &F,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>> {
    check_series_times(times, lp.time)?;
    let mut current = lp.clone();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        current = advect_loop(&current, field, t, cfg)?;
        out.push((t, circulation(&current, field)?));
    }
    Ok(out)
}

/// Marker doubling for loops that stretch under the flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement {
    pub max_markers: usize,
    pub tail_tolerance: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            max_markers: 8192,
            tail_tolerance: 1e-6,
        }
    }
}

/// Kelvin series on a loop rebuilt by `build(n)` from its labels. Whenever
/// the advected markers stop resolving the curve the marker count doubles
/// and the loop is re-advected from its initial labels. Returns
/// `(t, circulation, markers used)`.
pub fn refined_kelvin_series<F, B>(
    build: B,
    initial_markers: usize,
    field: &F,
    times: &[f64],
    cfg: &IntegratorConfig,
    refine: &Refinement,
) -> Result<Vec<(f64, f64, usize)>>
where
    F: FlowField + ?Sized,
    B: Fn(usize) -> Result<MaterialLoop>,
{
    let mut n = initial_markers;
    let mut origin = build(n)?;
    check_series_times(times, origin.time)?;
    let mut current = origin.clone();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut lp = advect_loop(&current, field, t, cfg)?;
        while lp.spectral_tail() > refine.tail_tolerance && 2 * n <= refine.max_markers {
            n *= 2;
            origin = build(n)?;
            lp = advect_loop(&origin, field, t, cfg)?;
        }
        out.push((t, circulation(&lp, field)?, n));
        current = lp;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::*;
    use std::f64::consts::PI;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::rk4(1e-3).unwrap()
    }

    #[test]
    fn too_few_markers() {
        assert!(MaterialLoop::circle(&Vec3::zeros(), 1.0, &Vec3::z(), 7).is_err());
    }

    #[test]
    fn rigid_unit_circle_circulation() {
        let f = make_rigid_rotation(1.0).unwrap();
        let lp = MaterialLoop::circle(&Vec3::zeros(), 1.0, &Vec3::z(), 256).unwrap();
        assert!((circulation(&lp, &f).unwrap() - TAU).abs() < 1e-10);
        assert!((lp.length() - TAU).abs() < 1e-12);
    }

    #[test]
    fn rigid_rotation_moves_circle_isometrically() {
        let f = make_rigid_rotation(1.0).unwrap();
        let lp = MaterialLoop::circle(&Vec3::zeros(), 1.0, &Vec3::z(), 64).unwrap();
        let moved = advect_loop(&lp, &f, 1.0, &cfg()).unwrap();
        for m in moved.markers() {
            assert!((m.position.norm() - 1.0).abs() < 1e-10);
        }
        let same = advect_loop(&lp, &f, 0.0, &cfg()).unwrap();
        assert_eq!(same.positions(), lp.positions());
    }

    #[test]
    fn strain_circulation_vanishes() {
        let f = make_linear_strain(1.0, 1.0, -2.0).unwrap();
        let lp = MaterialLoop::circle(
            &Vec3::new(0.1, 0.2, 0.0),
            0.7,
            &Vec3::new(1.0, 1.0, 1.0),
            64,
        )
        .unwrap();
        assert!(circulation(&lp, &f).unwrap().abs() < 1e-12);
    }

    #[test]
    fn abc_loop_stays_closed_and_stretches() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let lp = MaterialLoop::circle(&Vec3::repeat(PI), 0.5, &Vec3::z(), 128).unwrap();
        let moved = advect_loop(&lp, &f, 2.0, &cfg()).unwrap();
        assert!(moved.length() > lp.length());
        assert!(moved.closure_residual() <= 1e-9);
        assert!(moved
            .positions()
            .iter()
            .all(|p| p.iter().all(|c| c.is_finite())));
    }

    #[test]
    fn abc_kelvin_constancy() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let lp = MaterialLoop::circle(&Vec3::repeat(PI), 0.5, &Vec3::z(), 256).unwrap();
        let series = kelvin_series(&lp, &f, &[0.0, 1.0, 2.0], &cfg()).unwrap();
        let c0 = series[0].1;
        for (t, c) in &series {
            assert!((c - c0).abs() <= 1e-6 * c0.abs(), "t={t}: {c} vs {c0}");
        }
    }

    #[test]
    fn fourth_order_tangents_converge() {
        let f = make_rigid_rotation(1.0).unwrap();
        let err = |n| {
            let lp = MaterialLoop::circle(&Vec3::zeros(), 1.0, &Vec3::z(), n).unwrap();
            (circulation_with(&lp, &f, TangentScheme::FourthOrder).unwrap() - TAU).abs()
        };
        assert!(err(32) / err(64) >= 4.0);
    }

    #[test]
    fn series_rejects_descending_times() {
        let f = make_rigid_rotation(1.0).unwrap();
        let lp = MaterialLoop::circle(&Vec3::zeros(), 1.0, &Vec3::z(), 16).unwrap();
        assert!(kelvin_series(&lp, &f, &[1.0, 0.0], &cfg()).is_err());
    }

    #[test]
    fn refinement_doubles_markers_on_stretching_loop() {
        let f = make_abc(1.0, 1.0, 1.0).unwrap();
        let build = |n| MaterialLoop::circle(&Vec3::new(PI, PI, PI), 0.5, &Vec3::z(), n);
        let refine = Refinement {
            max_markers: 1024,
            tail_tolerance: 1e-6,
        };
        let s = refined_kelvin_series(build, 16, &f, &[0.0, 1.0, 3.0], &cfg(), &refine).unwrap();
        assert_eq!(s[0].2, 16);
        assert!(s[2].2 > s[0].2);
        for p in &s {
            assert!((p.1 - s[0].1).abs() < 1e-8 * s[0].1.abs(), "{s:?}");
        }
        let rigid = make_rigid_rotation(1.0).unwrap();
        let build = |n| MaterialLoop::circle(&Vec3::zeros(), 1.0, &Vec3::z(), n);
        let s = refined_kelvin_series(build, 16, &rigid, &[0.0, 1.0], &cfg(), &refine).unwrap();
        assert!(s.iter().all(|p| p.2 == 16));
    }
}
