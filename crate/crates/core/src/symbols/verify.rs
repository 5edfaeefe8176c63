//! Randomized comparison of the closed-form symbols with the matrix
//! exponential reference, and a sweep of the discriminant through zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{matexp_oracle, solution_symbol, Discriminant, Regime, TOL_DEG};
use crate::model::{FluidParams, ModelError};

/// Bound on `(alpha + beta) |xi|^2 t` for random cases, so the operator is
/// not dominated by underflow.
const MAX_DAMPING: f64 = 30.0;

/// Fixed `(alpha, beta, rho_ref)` and a signed discriminant fraction
/// `delta / ((alpha + beta)^2 / 4)`, which must be below 1 so that `kappa > 0`.
pub fn params_with_discriminant(
    alpha: f64,
    beta: f64,
    rho_ref: f64,
    fraction: f64,
) -> Result<FluidParams, ModelError> {
    let scale = 0.25 * (alpha + beta).powi(2);
    let kappa = scale * (1.0 - fraction) / rho_ref;
    FluidParams::with_quadratic_pressure(alpha * rho_ref, beta * rho_ref, kappa, rho_ref, 1.0)
}

/// One random `(params, xi, t)` in `regime`.
#[derive(Debug, Clone)]
pub struct SymbolCase {
    pub params: FluidParams,
    pub xi: Vec<f64>,
    pub t: f64,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

pub fn random_case(rng: &mut ChaCha8Rng, regime: Regime, dim: usize) -> SymbolCase {
    loop {
        let alpha = log_uniform(rng, 0.1, 5.0);
        let beta = log_uniform(rng, 0.01, 5.0);
        let rho_ref = log_uniform(rng, 0.2, 5.0);
        let fraction = match regime {
            Regime::PositiveReal => rng.random_range(0.01..0.99),
            Regime::NegativeOscillatory => -log_uniform(rng, 0.01, 10.0),
            Regime::Degenerate => rng.random_range(-0.5..0.5) * TOL_DEG,
        };
        let Ok(params) = params_with_discriminant(alpha, beta, rho_ref, fraction) else {
            continue;
        };
        if Discriminant::of(&params).regime != regime {
            continue;
        }
        let k = log_uniform(rng, 1e-2, 10.0);
        let dir: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        let xi: Vec<f64> = dir.iter().map(|v| k * v / norm).collect();
        let t_max = (MAX_DAMPING / ((alpha + beta) * k * k)).min(100.0);
        let t = log_uniform(rng, 1e-3 * t_max, t_max);
        return SymbolCase { params, xi, t };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub regime: Regime,
    pub cases: usize,
    /// Largest relative Frobenius deviation from the reference.
    pub max_deviation: f64,
}

/// Compares `cases` random instances per regime against [`matexp_oracle`].
/// The random stream of each regime is derived from `seed` alone.
pub fn verify_symbols(cases: usize, dim: usize, seed: u64) -> Vec<RegimeCheck> {
    [Regime::PositiveReal, Regime::NegativeOscillatory, Regime::Degenerate]
        .into_iter()
        .enumerate()
        .map(|(r, regime)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            let drawn: Vec<SymbolCase> = (0..cases).map(|_| random_case(&mut rng, regime, dim)).collect();
            let max_deviation = drawn
                .par_iter()
                .map(|c| solution_symbol(&c.params, &c.xi, c.t).relative_deviation(&matexp_oracle(&c.params, &c.xi, c.t)))
                .reduce(|| 0.0, f64::max);
            RegimeCheck {
                regime,
                cases,
                max_deviation,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracySweep {
    /// Signed discriminant fractions, increasing.
    pub fractions: Vec<f64>,
    /// Largest entry difference between neighbouring sweep points.
    pub max_step: f64,
    /// Entry difference across the switch from the degenerate formulas to
    /// the real-root formulas, evaluated just inside and outside the band.
    pub branch_jump: f64,
}

/// Sweeps the discriminant through zero at fixed `(alpha, beta, rho_ref, xi, t)`.
pub fn degeneracy_sweep(
    alpha: f64,
    beta: f64,
    rho_ref: f64,
    xi: &[f64],
    t: f64,
) -> Result<DegeneracySweep, ModelError> {
    let magnitudes: Vec<f64> = (0..=36).map(|i| 1e-3 * 10f64.powf(-(i as f64) / 4.0)).collect();
    let mut fractions: Vec<f64> = magnitudes.iter().map(|m| -m).collect();
    fractions.push(0.0);
    fractions.extend(magnitudes.iter().rev());
    let symbols = fractions
        .iter()
        .map(|&f| Ok(solution_symbol(&params_with_discriminant(alpha, beta, rho_ref, f)?, xi, t)))
        .collect::<Result<Vec<_>, ModelError>>()?;
    let max_step = symbols
        .windows(2)
        .map(|w| w[0].max_entry_diff(&w[1]))
        .fold(0.0, f64::max);
    let inside = params_with_discriminant(alpha, beta, rho_ref, TOL_DEG * (1.0 - 1e-6))?;
    let outside = params_with_discriminant(alpha, beta, rho_ref, TOL_DEG * (1.0 + 1e-6))?;
    debug_assert_eq!(Discriminant::of(&inside).regime, Regime::Degenerate);
    let branch_jump = solution_symbol(&inside, xi, t).max_entry_diff(&solution_symbol(&outside, xi, t));
    Ok(DegeneracySweep {
        fractions,
        max_step,
        branch_jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_land_in_their_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for regime in [Regime::PositiveReal, Regime::NegativeOscillatory, Regime::Degenerate] {
            for _ in 0..50 {
                let c = random_case(&mut rng, regime, 3);
                assert_eq!(Discriminant::of(&c.params).regime, regime);
                assert_eq!(c.xi.len(), 3);
            }
        }
    }

    #[test]
    fn discriminant_fraction_is_exact() {
        let p = params_with_discriminant(1.5, 0.5, 2.0, -0.75).unwrap();
        assert!((p.delta() - (-0.75)).abs() < 1e-14);
        assert!(params_with_discriminant(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn small_verification_is_accurate_and_repeatable() {
        let a = verify_symbols(40, 2, 9);
        assert_eq!(a, verify_symbols(40, 2, 9));
        assert!(a.iter().all(|c| c.max_deviation <= 1e-10), "{a:?}");
    }
}
