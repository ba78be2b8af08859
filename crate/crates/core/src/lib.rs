//! Lagrangian ideal-fluid diagnostics.
//!
//! The crate integrates particle characteristics together with their tangent
//! (Jacobian) flow and uses the result to check, on exact analytic Euler
//! solutions, the classical Lagrangian conservation laws:
//!
//! * mass conservation through the Jacobian determinant ([`flow_map`]),
//! * time-constancy of the Cauchy invariants and the Cauchy vorticity
//!   formula ([`cauchy`]),
//! * Kelvin circulation, Helmholtz vorticity flux and Stokes consistency on
//!   advected material loops and surfaces ([`geometry`]),
//! * Clebsch-variable structure and the helicity obstruction ([`clebsch`]),
//! * the barotropic least-action principle ([`action`]).
//!
//! [`harness`] wraps everything in a JSON-configured experiment runner used by
//! the `lagflow` binary.

// `!(x > 0.0)` is used throughout to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod cauchy;
pub mod clebsch;
pub mod error;
pub mod field;
pub mod flow_map;
pub mod geometry;
pub mod harness;
pub mod numerics;

pub use error::{Error, Result};
pub use field::{BarotropicClosure, Domain, FlowField};
pub use flow_map::{IntegratorConfig, Scheme, TrajectoryState};

/// Spatial vector (positions, velocities, vorticity).
pub type Vec3 = nalgebra::Vector3<f64>;

/// 3×3 real matrix. Velocity gradients use the convention `G[(i, j)] = ∂u_i/∂x_j`,
/// Jacobians of the Lagrangian map `J[(i, j)] = ∂x_i/∂a_j`.
pub type Mat3 = nalgebra::Matrix3<f64>;
