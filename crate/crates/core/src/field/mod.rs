//! Analytic Euler solutions used as ground truth by every verifier.
//!
//! Each catalog entry is an exact solution of the incompressible (unit
//! density) or barotropic Euler equations with a potential body force
//! `X = ∇V`. Entries are immutable after construction and safe to share
//! across threads.

mod catalog;
mod closure;
mod registry;
mod residual;

use std::f64::consts::TAU;

pub use catalog::{
    make_abc, make_free_expansion, make_linear_strain, make_planar_taylor_green,
    make_rigid_rotation, make_shear, Abc, FreeExpansion, LinearStrain, PlanarTaylorGreen,
    RigidRotation, Shear, ShearProfile,
};
pub use closure::BarotropicClosure;
pub use registry::{catalog_names, from_name, FieldParams};
pub use residual::euler_residual;

use crate::numerics::fd;
use crate::{Mat3, Result, Vec3};

/// Spatial domain on which a field is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Periodic cube `[0, period)³`.
    PeriodicBox { period: f64 },
    /// All of space. Sampling uses the cube `[-1, 1]³`.
    Unbounded,
}

impl Domain {
    pub const STANDARD_BOX: Domain = Domain::PeriodicBox { period: TAU };

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::PeriodicBox { .. })
    }

    /// Reduces a position into the fundamental cell. Identity on unbounded
    /// domains.
    pub fn wrap(&self, x: &Vec3) -> Vec3 {
        match self {
            Domain::PeriodicBox { period } => x.map(|c| {
                let r = c.rem_euclid(*period);
                if r < *period {
                    r
                } else {
                    0.0
                }
            }),
            Domain::Unbounded => *x,
        }
    }

    /// Box used for quasi-random sampling and verification grids.
    pub fn sample_box(&self) -> (Vec3, Vec3) {
        match self {
            Domain::PeriodicBox { period } => (Vec3::zeros(), Vec3::repeat(*period)),
            Domain::Unbounded => (Vec3::repeat(-1.0), Vec3::repeat(1.0)),
        }
    }

    pub fn volume(&self) -> f64 {
        let (lo, hi) = self.sample_box();
        (hi - lo).product()
    }
}

/// An analytic space-time flow: velocity, pressure, density and
/// force potential, plus closure metadata.
pub trait FlowField: Send + Sync {
    fn name(&self) -> &str;

    fn velocity(&self, x: &Vec3, t: f64) -> Vec3;

    /// Analytic velocity gradient `G[(i, j)] = ∂u_i/∂x_j`, if known.
    fn velocity_gradient(&self, _x: &Vec3, _t: f64) -> Option<Mat3> {
        None
    }

    fn pressure(&self, x: &Vec3, t: f64) -> f64;

    fn density(&self, _x: &Vec3, _t: f64) -> f64 {
        1.0
    }

    fn force_potential(&self, _x: &Vec3, _t: f64) -> f64 {
        0.0
    }

    fn is_steady(&self) -> bool;

    fn is_incompressible(&self) -> bool;

    fn closure(&self) -> Option<&BarotropicClosure> {
        None
    }

    fn domain(&self) -> Domain;

    /// Whether `t` lies in the time interval where the solution exists.
    fn valid_time(&self, _t: f64) -> bool {
        true
    }

    /// Analytic gradient when available, otherwise 4th-order central
    /// differences with [`fd::DEFAULT_STEP`].
    fn gradient(&self, x: &Vec3, t: f64) -> Mat3 {
        self.velocity_gradient(x, t)
            .unwrap_or_else(|| fd::jacobian4(|y| self.velocity(y, t), x, fd::DEFAULT_STEP))
    }

    fn vorticity(&self, x: &Vec3, t: f64) -> Vec3 {
        fd::curl_from_gradient(&self.gradient(x, t))
    }
}

impl<F: FlowField + ?Sized> FlowField for Box<F> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn velocity(&self, x: &Vec3, t: f64) -> Vec3 {
        (**self).velocity(x, t)
    }
    fn velocity_gradient(&self, x: &Vec3, t: f64) -> Option<Mat3> {
        (**self).velocity_gradient(x, t)
    }
    fn pressure(&self, x: &Vec3, t: f64) -> f64 {
        (**self).pressure(x, t)
    }
    fn density(&self, x: &Vec3, t: f64) -> f64 {
        (**self).density(x, t)
    }
    fn force_potential(&self, x: &Vec3, t: f64) -> f64 {
        (**self).force_potential(x, t)
    }
    fn is_steady(&self) -> bool {
        (**self).is_steady()
    }
    fn is_incompressible(&self) -> bool {
        (**self).is_incompressible()
    }
    fn closure(&self) -> Option<&BarotropicClosure> {
        (**self).closure()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn valid_time(&self, t: f64) -> bool {
        (**self).valid_time(t)
    }
}

/// Pressure work per unit mass: the barotropic enthalpy when the field has a
/// closure, otherwise `p/ρ`.
pub fn pressure_work<F: FlowField + ?Sized>(field: &F, x: &Vec3, t: f64) -> Result<f64> {
    let p = field.pressure(x, t);
    match field.closure() {
        Some(c) => c.enthalpy(p),
        None => crate::error::finite(p / field.density(x, t), "pressure work"),
    }
}
