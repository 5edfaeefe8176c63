use std::fmt;
use std::sync::Arc;

use super::ModelError;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Pressure law `P(rho)` together with its first two derivatives.
///
/// The built-in families are evaluated in closed form. User-supplied laws
/// are accepted only after their derivatives pass a centered
/// finite-difference consistency gate on the validity interval.
#[derive(Clone)]
pub struct PressureLaw {
    kind: PressureKind,
    validity: (f64, f64),
}

#[derive(Clone)]
enum PressureKind {
    /// `K (rho - rho_ref)^2`
    CriticalQuadratic { k: f64, rho_ref: f64 },
    /// `sum_j c_j (rho - rho_ref)^j`
    Polynomial { coeffs: Vec<f64>, rho_ref: f64 },
    Custom {
        evaluate: ScalarFn,
        d1: ScalarFn,
        d2: ScalarFn,
    },
}

impl PressureLaw {
    /// `P(rho) = K (rho - rho_ref)^2`, which has `P'(rho_ref) = 0` exactly.
    pub fn critical_quadratic(k: f64, rho_ref: f64) -> Self {
        Self {
            kind: PressureKind::CriticalQuadratic { k, rho_ref },
            validity: (f64::MIN_POSITIVE, f64::INFINITY),
        }
    }

    /// Polynomial in `rho - rho_ref` with coefficients `c_0, c_1, ...`.
    pub fn polynomial(coeffs: Vec<f64>, rho_ref: f64) -> Self {
        Self {
            kind: PressureKind::Polynomial { coeffs, rho_ref },
            validity: (f64::MIN_POSITIVE, f64::INFINITY),
        }
    }

    /// User-supplied triple `(P, P', P'')` valid on the open interval
    /// `(rho_min, rho_max)`.
    pub fn custom<P, D1, D2>(
        evaluate: P,
        d1: D1,
        d2: D2,
        rho_min: f64,
        rho_max: f64,
    ) -> Result<Self, ModelError>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(rho_min > 0.0 && rho_max > rho_min) {
            return Err(ModelError::ConstraintViolation(
                "0 < rho_min < rho_max for the pressure validity interval",
            ));
        }
        let law = Self {
            kind: PressureKind::Custom {
                evaluate: Arc::new(evaluate),
                d1: Arc::new(d1),
                d2: Arc::new(d2),
            },
            validity: (rho_min, rho_max),
        };
        law.check_derivatives()?;
        Ok(law)
    }

    pub fn validity(&self) -> (f64, f64) {
        self.validity
    }

    pub fn is_valid_at(&self, rho: f64) -> bool {
        rho > self.validity.0 && rho < self.validity.1
    }

    pub fn evaluate(&self, rho: f64) -> f64 {
        match &self.kind {
            PressureKind::CriticalQuadratic { k, rho_ref } => k * (rho - rho_ref).powi(2),
            PressureKind::Polynomial { coeffs, rho_ref } => {
                let x = rho - rho_ref;
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            PressureKind::Custom { evaluate, .. } => evaluate(rho),
        }
    }

    pub fn d1(&self, rho: f64) -> f64 {
        match &self.kind {
            PressureKind::CriticalQuadratic { k, rho_ref } => 2.0 * k * (rho - rho_ref),
            PressureKind::Polynomial { coeffs, rho_ref } => {
                let x = rho - rho_ref;
                coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (j, c)| acc * x + j as f64 * c)
            }
            PressureKind::Custom { d1, .. } => d1(rho),
        }
    }

    pub fn d2(&self, rho: f64) -> f64 {
        match &self.kind {
            PressureKind::CriticalQuadratic { k, .. } => 2.0 * k,
            PressureKind::Polynomial { coeffs, rho_ref } => {
                let x = rho - rho_ref;
                coeffs
                    .iter()
                    .enumerate()
                    .skip(2)
                    .rev()
                    .fold(0.0, |acc, (j, c)| acc * x + (j * (j - 1)) as f64 * c)
            }
            PressureKind::Custom { d2, .. } => d2(rho),
        }
    }

    /// Compares `d1`/`d2` against centered differences of `evaluate` at
    /// interior sample points of the validity interval.
    fn check_derivatives(&self) -> Result<(), ModelError> {
        let (lo, hi) = self.validity;
        let hi = if hi.is_finite() { hi } else { lo.max(1.0) * 4.0 };
        const SAMPLES: usize = 17;
        for i in 1..SAMPLES {
            let rho = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            let h = 1e-4 * rho.abs().max(1.0).min(hi - rho).min(rho - lo).max(1e-8);
            let p = |r| self.evaluate(r);
            let fd1 = (p(rho + h) - p(rho - h)) / (2.0 * h);
            let fd2 = (p(rho + h) - 2.0 * p(rho) + p(rho - h)) / (h * h);
            let scale = 1.0_f64.max(p(rho).abs()).max(self.d1(rho).abs());
            if (fd1 - self.d1(rho)).abs() > 1e-5 * scale {
                return Err(ModelError::InconsistentPressure { rho, order: 1 });
            }
            let scale2 = scale.max(self.d2(rho).abs());
            if (fd2 - self.d2(rho)).abs() > 1e-3 * scale2 {
                return Err(ModelError::InconsistentPressure { rho, order: 2 });
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PressureLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PressureKind::CriticalQuadratic { k, rho_ref } => f
                .debug_struct("CriticalQuadratic")
                .field("k", k)
                .field("rho_ref", rho_ref)
                .finish(),
            PressureKind::Polynomial { coeffs, rho_ref } => f
                .debug_struct("Polynomial")
                .field("coeffs", coeffs)
                .field("rho_ref", rho_ref)
                .finish(),
            PressureKind::Custom { .. } => f
                .debug_struct("Custom")
                .field("validity", &self.validity)
                .finish_non_exhaustive(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_critical() {
        let p = PressureLaw::critical_quadratic(3.0, 1.5);
        assert_eq!(p.d1(1.5), 0.0);
        assert_eq!(p.d2(0.7), 6.0);
        assert_eq!(p.evaluate(2.5), 3.0);
    }

    #[test]
    fn polynomial_derivatives() {
        // 1 + 0 x + 2 x^2 - x^3 around rho_ref = 1
        let p = PressureLaw::polynomial(vec![1.0, 0.0, 2.0, -1.0], 1.0);
        let x: f64 = 0.3;
        assert!((p.evaluate(1.3) - (1.0 + 2.0 * x * x - x.powi(3))).abs() < 1e-15);
        assert!((p.d1(1.3) - (4.0 * x - 3.0 * x * x)).abs() < 1e-15);
        assert!((p.d2(1.3) - (4.0 - 6.0 * x)).abs() < 1e-15);
    }

    #[test]
    fn custom_law_passes_gate() {
        let law = PressureLaw::custom(
            |r: f64| (r - 1.0).powi(3) + (r - 1.0).powi(2),
            |r: f64| 3.0 * (r - 1.0).powi(2) + 2.0 * (r - 1.0),
            |r: f64| 6.0 * (r - 1.0) + 2.0,
            0.1,
            5.0,
        );
        assert!(law.is_ok());
    }

    #[test]
    fn custom_law_with_wrong_derivative_is_rejected() {
        let law = PressureLaw::custom(
            |r: f64| r * r,
            |r: f64| r,
            |_| 2.0,
            0.1,
            5.0,
        );
        assert!(matches!(
            law,
            Err(ModelError::InconsistentPressure { order: 1, .. })
        ));
    }

    #[test]
    fn fd_error_shrinks_quadratically() {
        let p = PressureLaw::custom(
            |r: f64| r.ln() * r.sin(),
            |r: f64| r.sin() / r + r.ln() * r.cos(),
            |r: f64| -r.sin() / (r * r) + 2.0 * r.cos() / r - r.ln() * r.sin(),
            0.2,
            3.0,
        )
        .unwrap();
        let rho = 1.7;
        let err = |h: f64| ((p.evaluate(rho + h) - p.evaluate(rho - h)) / (2.0 * h) - p.d1(rho)).abs();
        let r = err(1e-2) / err(5e-3);
        assert!((3.5..4.5).contains(&r), "ratio {r}");
    }
}
