use super::{BarotropicClosure, Domain, FlowField};
use crate::{Error, Mat3, Result, Vec3};

/// Arnold–Beltrami–Childress flow
/// `u = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
///
/// Beltrami (`ω = u`), so `p = −|u|²/2` balances the steady momentum equation.
#[derive(Clone, Debug)]
pub struct Abc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn make_abc(a: f64, b: f64, c: f64) -> Result<Abc> {
    if ![a, b, c].iter().all(|v| v.is_finite()) {
        return Err(Error::param("A/B/C", "coefficients must be finite"));
    }
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(Error::DegenerateField(
            "ABC flow needs at least one nonzero coefficient".into(),
        ));
    }
    Ok(Abc { a, b, c })
}

impl FlowField for Abc {
    fn name(&self) -> &str {
        "abc"
    }

    fn velocity(&self, x: &Vec3, _t: f64) -> Vec3 {
        let x = self.domain().wrap(x);
        let (sx, cx) = x[0].sin_cos();
        let (sy, cy) = x[1].sin_cos();
        let (sz, cz) = x[2].sin_cos();
        Vec3::new(
            self.a * sz + self.c * cy,
            self.b * sx + self.a * cz,
            self.c * sy + self.b * cx,
        )
    }

    fn velocity_gradient(&self, x: &Vec3, _t: f64) -> Option<Mat3> {
        let x = self.domain().wrap(x);
        let (sx, cx) = x[0].sin_cos();
        let (sy, cy) = x[1].sin_cos();
        let (sz, cz) = x[2].sin_cos();
        let (a, b, c) = (self.a, self.b, self.c);
        #[rustfmt::skip]
        let g = Mat3::new(
            0.0,     -c * sy,  a * cz,
            b * cx,   0.0,    -a * sz,
            -b * sx,  c * cy,  0.0,
        );
        Some(g)
    }

    fn pressure(&self, x: &Vec3, t: f64) -> f64 {
        -0.5 * self.velocity(x, t).norm_squared()
    }

    fn is_steady(&self) -> bool {
        true
    }

    fn is_incompressible(&self) -> bool {
        true
    }

    fn domain(&self) -> Domain {
        Domain::STANDARD_BOX
    }
}

/// Solid-body rotation about the z axis, `u = (−ωy, ωx, 0)`.
#[derive(Clone, Debug)]
pub struct RigidRotation {
    pub omega: f64,
}

pub fn make_rigid_rotation(omega: f64) -> Result<RigidRotation> {
    if !omega.is_finite() {
        return Err(Error::param("omega", "must be finite"));
    }
    Ok(RigidRotation { omega })
}

impl FlowField for RigidRotation {
    fn name(&self) -> &str {
        "rigid"
    }

    fn velocity(&self, x: &Vec3, _t: f64) -> Vec3 {
        Vec3::new(-self.omega * x[1], self.omega * x[0], 0.0)
    }

    fn velocity_gradient(&self, _x: &Vec3, _t: f64) -> Option<Mat3> {
        let w = self.omega;
        Some(Mat3::new(0.0, -w, 0.0, w, 0.0, 0.0, 0.0, 0.0, 0.0))
    }

    fn pressure(&self, x: &Vec3, _t: f64) -> f64 {
        0.5 * self.omega * self.omega * (x[0] * x[0] + x[1] * x[1])
    }

    fn is_steady(&self) -> bool {
        true
    }

    fn is_incompressible(&self) -> bool {
        true
    }

    fn domain(&self) -> Domain {
        Domain::Unbounded
    }
}

/// Steady planar Taylor–Green cells `u = (sin x cos y, −cos x sin y, 0)`.
#[derive(Clone, Debug, Default)]
pub struct PlanarTaylorGreen;

pub fn make_planar_taylor_green() -> PlanarTaylorGreen {
    PlanarTaylorGreen
}

impl FlowField for PlanarTaylorGreen {
    fn name(&self) -> &str {
        "ptg"
    }

    fn velocity(&self, x: &Vec3, _t: f64) -> Vec3 {
        let x = self.domain().wrap(x);
        let (sx, cx) = x[0].sin_cos();
        let (sy, cy) = x[1].sin_cos();
        Vec3::new(sx * cy, -cx * sy, 0.0)
    }

    fn velocity_gradient(&self, x: &Vec3, _t: f64) -> Option<Mat3> {
        let x = self.domain().wrap(x);
        let (sx, cx) = x[0].sin_cos();
        let (sy, cy) = x[1].sin_cos();
        #[rustfmt::skip]
        let g = Mat3::new(
            cx * cy, -sx * sy, 0.0,
            sx * sy, -cx * cy, 0.0,
            0.0,      0.0,     0.0,
        );
        Some(g)
    }

    /// `p = (cos 2x + cos 2y)/4`, the sign that balances `u·∇u`.
    fn pressure(&self, x: &Vec3, _t: f64) -> f64 {
        let x = self.domain().wrap(x);
        0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos())
    }

    fn is_steady(&self) -> bool {
        true
    }

    fn is_incompressible(&self) -> bool {
        true
    }

    fn domain(&self) -> Domain {
        Domain::STANDARD_BOX
    }
}

/// Irrotational linear strain `u = (αx, βy, γz)` with `α + β + γ = 0`.
#[derive(Clone, Debug)]
pub struct LinearStrain {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn make_linear_strain(alpha: f64, beta: f64, gamma: f64) -> Result<LinearStrain> {
    if ![alpha, beta, gamma].iter().all(|v| v.is_finite()) {
        return Err(Error::param("alpha/beta/gamma", "rates must be finite"));
    }
    let trace = alpha + beta + gamma;
    let scale = alpha.abs().max(beta.abs()).max(gamma.abs()).max(1.0);
    if trace.abs() > 1e-12 * scale {
        return Err(Error::Constraint(format!(
            "linear strain must be traceless (incompressible), trace = {trace}"
        )));
    }
    Ok(LinearStrain { alpha, beta, gamma })
}

impl LinearStrain {
    fn rates(&self) -> Vec3 {
        Vec3::new(self.alpha, self.beta, self.gamma)
    }
}

impl FlowField for LinearStrain {
    fn name(&self) -> &str {
        "strain"
    }

    fn velocity(&self, x: &Vec3, _t: f64) -> Vec3 {
        self.rates().component_mul(x)
    }

    fn velocity_gradient(&self, _x: &Vec3, _t: f64) -> Option<Mat3> {
        Some(Mat3::from_diagonal(&self.rates()))
    }

    fn pressure(&self, x: &Vec3, _t: f64) -> f64 {
        -0.5 * self.rates().component_mul(x).norm_squared()
    }

    fn is_steady(&self) -> bool {
        true
    }

    fn is_incompressible(&self) -> bool {
        true
    }

    fn domain(&self) -> Domain {
        Domain::Unbounded
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShearProfile {
    Sin,
}

impl std::str::FromStr for ShearProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin" => Ok(ShearProfile::Sin),
            other => Err(Error::UnknownProfile(other.to_string())),
        }
    }
}

/// Parallel shear `u = (0, sin x, 0)` at uniform pressure.
///
/// Its flow map `x(a, t) = (a₁, a₂ + t sin a₁, a₃)` is known in closed form,
/// which gives an exactly material Clebsch pair.
#[derive(Clone, Debug)]
pub struct Shear {
    pub profile: ShearProfile,
}

pub fn make_shear(profile: &str) -> Result<Shear> {
    Ok(Shear {
        profile: profile.parse()?,
    })
}

impl FlowField for Shear {
    fn name(&self) -> &str {
        "shear"
    }

    fn velocity(&self, x: &Vec3, _t: f64) -> Vec3 {
        let x = self.domain().wrap(x);
        match self.profile {
            ShearProfile::Sin => Vec3::new(0.0, x[0].sin(), 0.0),
        }
    }

    fn velocity_gradient(&self, x: &Vec3, _t: f64) -> Option<Mat3> {
        let x = self.domain().wrap(x);
        let mut g = Mat3::zeros();
        match self.profile {
            ShearProfile::Sin => g[(1, 0)] = x[0].cos(),
        }
        Some(g)
    }

    fn pressure(&self, _x: &Vec3, _t: f64) -> f64 {
        1.0
    }

    fn is_steady(&self) -> bool {
        true
    }

    fn is_incompressible(&self) -> bool {
        true
    }

    fn domain(&self) -> Domain {
        Domain::STANDARD_BOX
    }
}

/// Homogeneous barotropic free expansion `u = x/(1+t)`,
/// `ρ = ρ₀/(1+t)³`, `p = K ρ^γ`, defined for `t > −1`.
#[derive(Clone, Debug)]
pub struct FreeExpansion {
    pub rho0: f64,
    pub closure: BarotropicClosure,
}

pub fn make_free_expansion(rho0: f64, closure: BarotropicClosure) -> Result<FreeExpansion> {
    if !(rho0.is_finite() && rho0 > 0.0) {
        return Err(Error::param("rho0", format!("must be > 0, got {rho0}")));
    }
    Ok(FreeExpansion { rho0, closure })
}

impl FreeExpansion {
    fn stretch(&self, t: f64) -> f64 {
        if t > -1.0 {
            1.0 + t
        } else {
            f64::NAN
        }
    }
}

impl FlowField for FreeExpansion {
    fn name(&self) -> &str {
        "expansion"
    }

    fn velocity(&self, x: &Vec3, t: f64) -> Vec3 {
        x / self.stretch(t)
    }

    fn velocity_gradient(&self, _x: &Vec3, t: f64) -> Option<Mat3> {
        Some(Mat3::identity() / self.stretch(t))
    }

    fn pressure(&self, x: &Vec3, t: f64) -> f64 {
        self.closure.pressure_from_density(self.density(x, t))
    }

    fn density(&self, _x: &Vec3, t: f64) -> f64 {
        self.rho0 / self.stretch(t).powi(3)
    }

    fn is_steady(&self) -> bool {
        false
    }

    fn is_incompressible(&self) -> bool {
        false
    }

    fn closure(&self) -> Option<&BarotropicClosure> {
        Some(&self.closure)
    }

    fn domain(&self) -> Domain {
        Domain::Unbounded
    }

    fn valid_time(&self, t: f64) -> bool {
        t > -1.0
    }
}
