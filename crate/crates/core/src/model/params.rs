use super::{ModelError, PressureLaw};

/// Relative tolerance of the criticality check `P'(rho_ref) = 0`.
pub const CRITICALITY_TOL: f64 = 1e-12;

/// Physical constants of the fluid at the reference state.
#[derive(Debug, Clone)]
pub struct FluidParams {
    mu: f64,
    nu: f64,
    kappa: f64,
    rho_ref: f64,
    pressure: PressureLaw,
    alpha: f64,
    beta: f64,
    delta: f64,
}

impl FluidParams {
    pub fn new(
        mu: f64,
        nu: f64,
        kappa: f64,
        rho_ref: f64,
        pressure: PressureLaw,
    ) -> Result<Self, ModelError> {
        if ![mu, nu, kappa, rho_ref].iter().all(|v| v.is_finite()) {
            return Err(ModelError::ConstraintViolation("finite coefficients"));
        }
        if !(mu > 0.0) {
            return Err(ModelError::ConstraintViolation("mu_star > 0"));
        }
        if !(mu + nu > 0.0) {
            return Err(ModelError::ConstraintViolation("mu_star + nu_star > 0"));
        }
        if !(kappa > 0.0) {
            return Err(ModelError::ConstraintViolation("kappa_star > 0"));
        }
        if !(rho_ref > 0.0) {
            return Err(ModelError::ConstraintViolation("rho_star > 0"));
        }
        if !pressure.is_valid_at(rho_ref) {
            return Err(ModelError::ConstraintViolation(
                "rho_star inside the pressure validity interval",
            ));
        }
        let d1 = pressure.d1(rho_ref);
        let d2 = pressure.d2(rho_ref);
        if !(d1.abs() <= CRITICALITY_TOL * d2.abs().max(1.0)) {
            return Err(ModelError::CriticalityViolation { d1, d2 });
        }
        let alpha = mu / rho_ref;
        let beta = nu / rho_ref;
        let delta = 0.25 * (alpha + beta).powi(2) - rho_ref * kappa;
        if !(alpha.is_finite() && beta.is_finite() && delta.is_finite()) {
            return Err(ModelError::ConstraintViolation("finite derived coefficients"));
        }
        Ok(Self {
            mu,
            nu,
            kappa,
            rho_ref,
            pressure,
            alpha,
            beta,
            delta,
        })
    }

    /// Parameters with the built-in critical quadratic law `P = K (rho - rho_ref)^2`.
    pub fn with_quadratic_pressure(
        mu: f64,
        nu: f64,
        kappa: f64,
        rho_ref: f64,
        k: f64,
    ) -> Result<Self, ModelError> {
        Self::new(mu, nu, kappa, rho_ref, PressureLaw::critical_quadratic(k, rho_ref))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn rho_ref(&self) -> f64 {
        self.rho_ref
    }
    pub fn pressure(&self) -> &PressureLaw {
        &self.pressure
    }
    /// `mu / rho_ref`
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// `nu / rho_ref`
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// Discriminant `(alpha + beta)^2 / 4 - rho_ref * kappa`.
    pub fn delta(&self) -> f64 {
        self.delta
    }
    /// `rho_ref * kappa`, the capillary coupling of the linear system.
    pub fn capillarity(&self) -> f64 {
        self.rho_ref * self.kappa
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_params() {
        let p = FluidParams::with_quadratic_pressure(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.alpha(), 1.0);
        assert_eq!(p.beta(), 1.0);
        assert_eq!(p.delta(), 0.0);
    }

    #[test]
    fn zero_viscosity_rejected() {
        let err = FluidParams::with_quadratic_pressure(0.0, 1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert_eq!(err, ModelError::ConstraintViolation("mu_star > 0"));
    }

    #[test]
    fn bulk_and_capillarity_constraints() {
        let err = FluidParams::with_quadratic_pressure(1.0, -1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert_eq!(err, ModelError::ConstraintViolation("mu_star + nu_star > 0"));
        let err = FluidParams::with_quadratic_pressure(1.0, 1.0, 0.0, 1.0, 1.0).unwrap_err();
        assert_eq!(err, ModelError::ConstraintViolation("kappa_star > 0"));
    }

    #[test]
    fn linear_pressure_is_not_critical() {
        let law = PressureLaw::polynomial(vec![1.0, 1.0], 1.0);
        let err = FluidParams::new(1.0, 1.0, 1.0, 1.0, law).unwrap_err();
        assert!(matches!(err, ModelError::CriticalityViolation { d1, .. } if d1 == 1.0));
    }

    proptest! {
        #[test]
        fn constructed_params_satisfy_conditions(
            mu in -2.0f64..5.0,
            nu in -5.0f64..5.0,
            kappa in -1.0f64..5.0,
            rho in 0.01f64..10.0,
            c1 in prop_oneof![Just(0.0), -1e-6f64..1e-6],
        ) {
            let law = PressureLaw::polynomial(vec![0.0, c1, 1.0], rho);
            if let Ok(p) = FluidParams::new(mu, nu, kappa, rho, law) {
                prop_assert!(p.mu() > 0.0 && p.mu() + p.nu() > 0.0 && p.kappa() > 0.0);
                let d1 = p.pressure().d1(rho);
                prop_assert!(d1.abs() <= CRITICALITY_TOL * p.pressure().d2(rho).abs().max(1.0));
                prop_assert!((p.alpha() - mu / rho).abs() <= 1e-15 * p.alpha().abs());
            } else {
                prop_assert!(mu <= 0.0 || mu + nu <= 0.0 || kappa <= 0.0 || c1 != 0.0);
            }
        }
    }
}
