//! Small numerical kernels shared by the verifiers: finite differences,
//! quadrature rules, spectral differentiation of periodic samples,
//! low-discrepancy point sets and convergence-order fits.

pub mod fd;
pub mod fit;
pub mod halton;
pub mod quadrature;
pub mod spectral;
