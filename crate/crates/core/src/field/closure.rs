use crate::{Error, Result};

/// Polytropic barotropic relation `p = K ρ^γ`, i.e. `ρ = φ(p) = (p/K)^{1/γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarotropicClosure {
    gamma: f64,
    k: f64,
}

impl BarotropicClosure {
    pub fn new(gamma: f64, k: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::param("gamma", format!("must be > 1, got {gamma}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::param("K", format!("must be > 0, got {k}")));
        }
        Ok(Self { gamma, k })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `φ(p)`.
    pub fn density_from_pressure(&self, p: f64) -> f64 {
        (p / self.k).powf(1.0 / self.gamma)
    }

    pub fn pressure_from_density(&self, rho: f64) -> f64 {
        self.k * rho.powf(self.gamma)
    }

    /// Enthalpy `f(p) = ∫ dp/φ(p) = γ/(γ−1) · K^{1/γ} · p^{(γ−1)/γ}`.
    pub fn enthalpy(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::param(
                "p",
                format!("pressure must be positive, got {p}"),
            ));
        }
        let g = self.gamma;
        Ok(g / (g - 1.0) * self.k.powf(1.0 / g) * p.powf((g - 1.0) / g))
    }

    /// Internal energy per unit mass `e(ρ) = K ρ^{γ−1}/(γ−1)`, with
    /// `de/dρ = p/ρ²`.
    pub fn internal_energy(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::param(
                "rho",
                format!("density must be positive, got {rho}"),
            ));
        }
        Ok(self.k * rho.powf(self.gamma - 1.0) / (self.gamma - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fd::central4;

    #[test]
    fn internal_energy_derivative() {
        let c = BarotropicClosure::new(5.0 / 3.0, 0.7).unwrap();
        for rho in [0.2, 1.0, 3.0] {
            let d = central4(|r| c.internal_energy(r).unwrap(), rho, 1e-3);
            assert!((d - c.pressure_from_density(rho) / (rho * rho)).abs() < 1e-9);
        }
        assert!(c.internal_energy(0.0).is_err());
    }

    #[test]
    fn enthalpy_derivative_is_specific_volume() {
        let c = BarotropicClosure::new(1.4, 2.5).unwrap();
        for p in [0.3, 1.0, 4.0] {
            let d = central4(|q| c.enthalpy(q).unwrap(), p, 1e-3);
            assert!((d - 1.0 / c.density_from_pressure(p)).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn gamma_two_unit_pressure() {
        let c = BarotropicClosure::new(2.0, 1.0).unwrap();
        assert!((c.enthalpy(1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BarotropicClosure::new(1.0, 1.0).is_err());
        assert!(BarotropicClosure::new(1.4, 0.0).is_err());
        let c = BarotropicClosure::new(1.4, 1.0).unwrap();
        assert!(c.enthalpy(0.0).is_err());
    }

    #[test]
    fn density_pressure_roundtrip() {
        let c = BarotropicClosure::new(5.0 / 3.0, 0.7).unwrap();
        let rho = 0.42;
        let p = c.pressure_from_density(rho);
        assert!((c.density_from_pressure(p) - rho).abs() < 1e-14);
    }
}
