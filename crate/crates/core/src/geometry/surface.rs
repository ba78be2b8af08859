use std::f64::consts::TAU;

use super::{
    advect_states, check_series_times, check_synchronous, circulation, orthonormal_frame,
    MaterialLoop, VorticitySource, MIN_MARKERS,
};
use crate::cauchy::transported_vorticity;
use crate::field::FlowField;
use crate::flow_map::{IntegratorConfig, TrajectoryState};
use crate::numerics::{fd, quadrature, spectral};
use crate::{Error, Result, Vec3};

/// Topology of the `(s, r)` parameter square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Polar disk: `s ∈ [0, 1]` radial (node 0 is the center), `r ∈ [0, 1)`
    /// periodic angle. The rim `s = 1` is the boundary loop.
    Disk,
    /// Open patch over `[0, 1]²`; the boundary is its four edges.
    Patch,
}

/// Marker grid over a smooth embedded surface, stored row-major with `s`
/// as the slow index.
#[derive(Clone, Debug)]
pub struct MaterialSurface {
    kind: SurfaceKind,
    ns: usize,
    nr: usize,
    grid: Vec<TrajectoryState>,
    time: f64,
}

/// Boundary of a [`MaterialSurface`], oriented counter-clockwise with respect
/// to the normal `∂x/∂s × ∂x/∂r`.
#[derive(Clone, Debug)]
pub enum Boundary {
    Loop(MaterialLoop),
    /// Open edges traversed in order; each edge is uniformly parametrized.
    Edges(Vec<Vec<TrajectoryState>>),
}

impl MaterialSurface {
    fn check_counts(ns: usize, nr: usize) -> Result<()> {
        if ns < MIN_MARKERS || nr < MIN_MARKERS {
            return Err(Error::DegenerateGeometry(format!(
                "surface grids need at least {MIN_MARKERS}×{MIN_MARKERS} markers, got {ns}×{nr}"
            )));
        }
        Ok(())
    }

    /// Flat disk of the given radius centred at `center` with unit normal
    /// along `normal`.
    pub fn disk(center: &Vec3, radius: f64, normal: &Vec3, ns: usize, nr: usize) -> Result<Self> {
        Self::check_counts(ns, nr)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateGeometry(format!("disk radius {radius}")));
        }
        let (e1, e2, _) = orthonormal_frame(normal)?;
        let mut grid = Vec::with_capacity(ns * nr);
        for i in 0..ns {
            let rho = radius * i as f64 / (ns - 1) as f64;
            for j in 0..nr {
                let (sn, cs) = (TAU * j as f64 / nr as f64).sin_cos();
                grid.push(TrajectoryState::initial(center + (e1 * cs + e2 * sn) * rho));
            }
        }
        Self::from_grid(SurfaceKind::Disk, ns, nr, grid)
    }

    /// Open patch `embedding(s, r)` sampled on a uniform `ns × nr` grid of
    /// `[0, 1]²` (endpoints included).
    pub fn patch<E: Fn(f64, f64) -> Vec3>(embedding: E, ns: usize, nr: usize) -> Result<Self> {
        Self::check_counts(ns, nr)?;
        let mut grid = Vec::with_capacity(ns * nr);
        for i in 0..ns {
            let s = i as f64 / (ns - 1) as f64;
            for j in 0..nr {
                let r = j as f64 / (nr - 1) as f64;
                grid.push(TrajectoryState::initial(embedding(s, r)));
            }
        }
        Self::from_grid(SurfaceKind::Patch, ns, nr, grid)
    }

    /// Parallelogram `origin + s·edge1 + r·edge2`.
    pub fn rectangle(
        origin: &Vec3,
        edge1: &Vec3,
        edge2: &Vec3,
        ns: usize,
        nr: usize,
    ) -> Result<Self> {
        Self::patch(|s, r| origin + edge1 * s + edge2 * r, ns, nr)
    }

    pub fn from_grid(
        kind: SurfaceKind,
        ns: usize,
        nr: usize,
        grid: Vec<TrajectoryState>,
    ) -> Result<Self> {
        Self::check_counts(ns, nr)?;
        if grid.len() != ns * nr {
            return Err(Error::DegenerateGeometry(format!(
                "grid has {} markers, expected {ns}×{nr}",
                grid.len()
            )));
        }
        let time = check_synchronous(&grid)?;
        Ok(Self {
            kind,
            ns,
            nr,
            grid,
            time,
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ns, self.nr)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn markers(&self) -> &[TrajectoryState] {
        &self.grid
    }

    fn at(&self, i: usize, j: usize) -> &TrajectoryState {
        &self.grid[i * self.nr + j]
    }

    /// Tangent vectors `(∂x/∂s, ∂x/∂r)` at every marker, row-major.
    fn tangents(&self) -> (Vec<Vec3>, Vec<Vec3>) {
        let (ns, nr) = (self.ns, self.nr);
        let ds = 1.0 / (ns - 1) as f64;
        let mut xs = vec![Vec3::zeros(); ns * nr];
        let mut xr = vec![Vec3::zeros(); ns * nr];
        for j in 0..nr {
            let col: Vec<Vec3> = (0..ns).map(|i| self.at(i, j).position).collect();
            for (i, d) in fd::open_derivative4(&col, ds).into_iter().enumerate() {
                xs[i * nr + j] = d;
            }
        }
        for i in 0..ns {
            let row: Vec<Vec3> = (0..nr).map(|j| self.at(i, j).position).collect();
            let d = match self.kind {
                SurfaceKind::Disk => spectral::periodic_derivative(&row, 1.0),
                SurfaceKind::Patch => fd::open_derivative4(&row, 1.0 / (nr - 1) as f64),
            };
            xr[i * nr..(i + 1) * nr].copy_from_slice(&d);
        }
        (xs, xr)
    }

    fn weights(&self) -> (Vec<f64>, Vec<f64>) {
        let ws = open_weights(self.ns);
        let wr = match self.kind {
            SurfaceKind::Disk => vec![1.0 / self.nr as f64; self.nr],
            SurfaceKind::Patch => open_weights(self.nr),
        };
        (ws, wr)
    }

    /// Surface area `∫ |x_s × x_r| ds dr`.
    pub fn area(&self) -> f64 {
        let (xs, xr) = self.tangents();
        let (ws, wr) = self.weights();
        let mut a = 0.0;
        for (i, wi) in ws.iter().enumerate() {
            for (j, wj) in wr.iter().enumerate() {
                let k = i * self.nr + j;
                a += wi * wj * xs[k].cross(&xr[k]).norm();
            }
        }
        a
    }

    pub fn boundary(&self) -> Result<Boundary> {
        let (ns, nr) = (self.ns, self.nr);
        match self.kind {
            SurfaceKind::Disk => {
                let rim = (0..nr).map(|j| *self.at(ns - 1, j)).collect();
                Ok(Boundary::Loop(MaterialLoop::from_states(rim)?))
            }
            SurfaceKind::Patch => {
                let e1 = (0..ns).map(|i| *self.at(i, 0)).collect();
                let e2 = (0..nr).map(|j| *self.at(ns - 1, j)).collect();
                let e3 = (0..ns).rev().map(|i| *self.at(i, nr - 1)).collect();
                let e4 = (0..nr).rev().map(|j| *self.at(0, j)).collect();
                Ok(Boundary::Edges(vec![e1, e2, e3, e4]))
            }
        }
    }
}

/// Gregory weights on `[0, 1]`, lowering the correction count on coarse grids.
fn open_weights(n: usize) -> Vec<f64> {
    let corrections = (n / 2 - 1).min(quadrature::DEFAULT_CORRECTIONS);
    quadrature::gregory_weights(n, 1.0 / (n - 1) as f64, corrections)
}

pub fn advect_surface<F: FlowField + ?Sized>(
    surface: &MaterialSurface,
    field: &F,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<MaterialSurface> {
    let grid = advect_states(&surface.grid, field, t, cfg)?;
    Ok(MaterialSurface {
        kind: surface.kind,
        ns: surface.ns,
        nr: surface.nr,
        grid,
        time: t,
    })
}

/// `∫ ω·(∂x/∂s × ∂x/∂r) ds dr` with Eulerian vorticity at the markers.
pub fn vorticity_flux<F: FlowField + ?Sized>(surface: &MaterialSurface, field: &F) -> Result<f64> {
    vorticity_flux_with(surface, field, VorticitySource::Eulerian)
}

pub fn vorticity_flux_with<F: FlowField + ?Sized>(
    surface: &MaterialSurface,
    field: &F,
    source: VorticitySource,
) -> Result<f64> {
    let (xs, xr) = surface.tangents();
    let (ws, wr) = surface.weights();
    let mut flux = 0.0;
    let mut area = 0.0;
    for (i, wi) in ws.iter().enumerate() {
        for (j, wj) in wr.iter().enumerate() {
            let k = i * surface.nr + j;
            let m = &surface.grid[k];
            let normal = xs[k].cross(&xr[k]);
            let w = match source {
                VorticitySource::Eulerian => field.vorticity(&m.position, surface.time),
                VorticitySource::Cauchy => transported_vorticity(field, m)?,
            };
            flux += wi * wj * w.dot(&normal);
            area += wi * wj * normal.norm();
        }
    }
    let extent = surface
        .grid
        .iter()
        .map(|m| (m.position - surface.grid[0].position).norm())
        .fold(0.0, f64::max);
    if !(area > 1e-14 * extent * extent) || extent == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "patch has zero area ({area:e})"
        )));
    }
    crate::error::finite(flux, "vorticity flux")
}

fn edge_circulation<F: FlowField + ?Sized>(edge: &[TrajectoryState], field: &F) -> Result<f64> {
    let n = edge.len();
    if n < MIN_MARKERS {
        return Err(Error::DegenerateGeometry(format!("edge with {n} markers")));
    }
    let h = 1.0 / (n - 1) as f64;
    let pts: Vec<Vec3> = edge.iter().map(|m| m.position).collect();
    let d = fd::open_derivative4(&pts, h);
    let w = open_weights(n);
    Ok(edge
        .iter()
        .zip(d.iter().zip(&w))
        .map(|(m, (dx, wk))| wk * field.velocity(&m.position, m.time).dot(dx))
        .sum())
}

/// Circulation around the surface boundary.
pub fn boundary_circulation<F: FlowField + ?Sized>(
    surface: &MaterialSurface,
    field: &F,
) -> Result<f64> {
    match surface.boundary()? {
        Boundary::Loop(lp) => circulation(&lp, field),
        Boundary::Edges(edges) => edges
            .iter()
            .map(|e| edge_circulation(e, field))
            .sum::<Result<f64>>(),
    }
}

/// `|∮_{∂S} u·dx − ∫_S ω·n dσ|`.
pub fn stokes_check<F: FlowField + ?Sized>(surface: &MaterialSurface, field: &F) -> Result<f64> {
    Ok((boundary_circulation(surface, field)? - vorticity_flux(surface, field)?).abs())
}

/// Vorticity flux through the surface advected to each of the ascending
/// `times`.
pub fn helmholtz_series<F: FlowField + ?Sized>(
    surface: &MaterialSurface,
    field: &F,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>> {
    check_series_times(times, surface.time)?;
    let mut current = surface.clone();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        current = advect_surface(&current, field, t, cfg)?;
        out.push((t, vorticity_flux(&current, field)?));
    }
    Ok(out)
}
