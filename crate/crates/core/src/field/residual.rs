use super::FlowField;
use crate::error::finite_vec;
use crate::numerics::fd;
use crate::{Error, Result, Vec3};

/// Momentum residual `∂ₜu + (∇u)u − ∇V + ∇p/ρ` at `(x, t)`.
///
/// Pressure and force-potential gradients, and `∂ₜu` for unsteady fields,
/// use 4th-order central differences with step `fd_step`; the velocity
/// gradient is analytic when the field provides one.
pub fn euler_residual<F: FlowField + ?Sized>(
    field: &F,
    x: &Vec3,
    t: f64,
    fd_step: f64,
) -> Result<Vec3> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::param(
            "fd_step",
            format!("must be > 0, got {fd_step}"),
        ));
    }
    if !field.valid_time(t) {
        return Err(Error::TimeOutOfDomain {
            field: field.name().to_string(),
            t,
        });
    }
    let u = field.velocity(x, t);
    let g = field
        .velocity_gradient(x, t)
        .unwrap_or_else(|| fd::jacobian4(|y| field.velocity(y, t), x, fd_step));
    let dudt = if field.is_steady() {
        Vec3::zeros()
    } else {
        fd::central4(|s| field.velocity(x, s), t, fd_step)
    };
    let grad_p = fd::gradient4(|y| field.pressure(y, t), x, fd_step);
    let grad_v = fd::gradient4(|y| field.force_potential(y, t), x, fd_step);
    let rho = field.density(x, t);
    if !(rho > 0.0) {
        return Err(Error::NonFinite(format!("density {rho} at {x:?}")));
    }
    finite_vec(dudt + g * u - grad_v + grad_p / rho, "euler residual")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::*;
    use crate::numerics::halton::halton_points;
    use crate::{Domain, Mat3};

    /// Test double that hides the analytic gradient to exercise the FD path,
    /// and can scale the pressure.
    struct Wrapped<F> {
        inner: F,
        pressure_scale: f64,
        hide_gradient: bool,
    }

    impl<F: FlowField> FlowField for Wrapped<F> {
        fn name(&self) -> &str {
            self.inner.name()
        }
        fn velocity(&self, x: &Vec3, t: f64) -> Vec3 {
            self.inner.velocity(x, t)
        }
        fn velocity_gradient(&self, x: &Vec3, t: f64) -> Option<Mat3> {
            if self.hide_gradient {
                None
            } else {
                self.inner.velocity_gradient(x, t)
            }
        }
        fn pressure(&self, x: &Vec3, t: f64) -> f64 {
            self.pressure_scale * self.inner.pressure(x, t)
        }
        fn density(&self, x: &Vec3, t: f64) -> f64 {
            self.inner.density(x, t)
        }
        fn is_steady(&self) -> bool {
            self.inner.is_steady()
        }
        fn is_incompressible(&self) -> bool {
            self.inner.is_incompressible()
        }
        fn domain(&self) -> Domain {
            self.inner.domain()
        }
        fn valid_time(&self, t: f64) -> bool {
            self.inner.valid_time(t)
        }
    }

    fn max_residual(f: &dyn FlowField, pts: &[Vec3], t: f64) -> f64 {
        pts.iter()
            .map(|x| euler_residual(f, x, t, 1e-3).unwrap().norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rigid_rotation_residual_is_tiny() {
        let f = make_rigid_rotation(1.0).unwrap();
        let (lo, hi) = f.domain().sample_box();
        let pts = halton_points(100, &lo, &hi);
        assert!(max_residual(&f, &pts, 0.0) <= 1e-12);
        assert_eq!(
            euler_residual(&f, &Vec3::zeros(), 0.0, 1e-3).unwrap(),
            Vec3::zeros()
        );
    }

    #[test]
    fn planar_taylor_green_residual_on_grid() {
        let f = make_planar_taylor_green();
        let n = 16;
        let h = std::f64::consts::TAU / n as f64;
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    pts.push(Vec3::new(i as f64, j as f64, k as f64) * h);
                }
            }
        }
        assert!(max_residual(&f, &pts, 0.0) <= 1e-10);
    }

    #[test]
    fn corrupted_pressure_is_detected() {
        let f = Wrapped {
            inner: make_rigid_rotation(1.5).unwrap(),
            pressure_scale: 2.0,
            hide_gradient: false,
        };
        let x = Vec3::new(0.6, -0.3, 0.2);
        let r = euler_residual(&f, &x, 0.0, 1e-3).unwrap();
        let radius = (x[0] * x[0] + x[1] * x[1]).sqrt();
        // exact residual is ω² r (outward) for doubled pressure
        assert!((r.norm() - 1.5 * 1.5 * radius).abs() < 1e-10);
    }

    #[test]
    fn fd_gradient_path_agrees() {
        let f = Wrapped {
            inner: make_abc(1.0, 0.5, 0.25).unwrap(),
            pressure_scale: 1.0,
            hide_gradient: true,
        };
        let (lo, hi) = f.domain().sample_box();
        let pts = halton_points(50, &lo, &hi);
        assert!(max_residual(&f, &pts, 0.0) <= 1e-8);
    }

    #[test]
    fn expansion_residual_and_domain() {
        let c = BarotropicClosure::new(1.4, 1.0).unwrap();
        let f = make_free_expansion(2.0, c).unwrap();
        let pts = halton_points(100, &Vec3::repeat(-1.0), &Vec3::repeat(1.0));
        assert!(max_residual(&f, &pts, 0.7) <= 1e-8);
        assert!(matches!(
            euler_residual(&f, &Vec3::x(), -1.0, 1e-3),
            Err(Error::TimeOutOfDomain { .. })
        ));
        assert!(euler_residual(&f, &Vec3::x(), 0.0, 0.0).is_err());
    }
}
