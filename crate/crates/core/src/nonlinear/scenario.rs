use serde::{Deserialize, Serialize};

use super::NonlinearError;
use crate::analysis::AggregateExponents;
use crate::model::{gaussian_bump, random_smooth_tensor, FluidParams, Grid, SpectralState};
use crate::spectral::SpectralEngine;

/// Centered initial data: a Gaussian density bump and momentum `Div M0`
/// with `M0` a Gaussian-enveloped random smooth tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub bump_width: f64,
    pub tensor_width: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct NonlinearScenario {
    pub params: FluidParams,
    pub grid: Grid,
    pub initial: InitialData,
    /// Overall data amplitude.
    pub amplitude: f64,
    pub horizon: f64,
    pub dt: f64,
    pub exponents: AggregateExponents,
    /// Norms are sampled every this many steps (and at the final step).
    pub sample_every: usize,
    /// Every step up to this time is sampled, resolving the initial layer
    /// in the time integrals of the global norm.
    pub dense_until: f64,
    /// `false` drops `g`, leaving exact linear propagation.
    pub nonlinear: bool,
}

impl NonlinearScenario {
    /// Hard errors for unusable settings.
    pub fn check(&self) -> Result<(), NonlinearError> {
        let bad = |msg: String| Err(NonlinearError::InvalidScenario(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return bad(format!("amplitude must be non-negative, got {}", self.amplitude));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        if !(self.dense_until >= 0.0) {
            return bad(format!("dense_until must be non-negative, got {}", self.dense_until));
        }
        if !(self.initial.bump_width > 0.0 && self.initial.tensor_width > 0.0) {
            return bad("initial widths must be positive".into());
        }
        let e = &self.exponents;
        if !(e.p >= 1.0 && e.q1 >= 1.0 && e.q2 >= 1.0 && e.tau.is_finite()) {
            return bad("exponents must satisfy p, q1, q2 >= 1 with finite tau".into());
        }
        Ok(())
    }

    /// Conditions of the global existence result that this scenario breaks.
    /// They are reported, never enforced.
    pub fn scope_warnings(&self) -> Vec<String> {
        let n = self.grid.dim() as f64;
        let AggregateExponents { p, q1, q2, tau } = self.exponents;
        let mut out = Vec::new();
        let mut check = |ok: bool, what: &str| {
            if !ok {
                out.push(format!("outside theorem scope: {what}"));
            }
        };
        check((3.0..=7.0).contains(&n), "3 <= N <= 7");
        check(p > 2.0 && p.is_finite(), "2 < p < inf");
        check(q1 < n && n < q2, "q1 < N < q2");
        check(q1 > 2.0 && q1 <= 4.0, "2 < q1 <= 4");
        check(
            (1.0 / q1 - 1.0 / q2 - 1.0 / n).abs() <= 1e-12,
            "1/q1 = 1/q2 + 1/N",
        );
        check(2.0 / p + n / q2 < 1.0, "2/p + N/q2 < 1");
        check(1.0 / p < tau && tau < n / q2 + 1.0 / p, "1/p < tau < N/q2 + 1/p");
        out
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }

    /// Whether norms are recorded after `step` steps.
    pub fn samples_at(&self, step: usize) -> bool {
        step % self.sample_every == 0 || step as f64 * self.dt <= self.dense_until || step == self.steps()
    }

    /// Dealiased coefficients of the initial data.
    pub fn initial_state(&self, engine: &SpectralEngine) -> Result<SpectralState, NonlinearError> {
        let grid = self.grid;
        let center = grid.center();
        let theta = gaussian_bump(&grid, &center, self.initial.bump_width, self.amplitude);
        let tensor = random_smooth_tensor(
            &grid,
            &center,
            self.initial.tensor_width,
            self.amplitude,
            self.initial.seed,
        );
        let theta_hat = engine.forward_real(&theta);
        let tensor_hat: Vec<_> = tensor.comps.iter().map(|c| engine.forward_real(c)).collect();
        let mut state = SpectralState {
            grid,
            theta: theta_hat,
            m: engine.divergence_spectral(&tensor_hat),
        };
        state.dealias();
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(dim: usize) -> NonlinearScenario {
        NonlinearScenario {
            params: FluidParams::with_quadratic_pressure(1.0, 0.5, 1.0, 1.0, 1.0).unwrap(),
            grid: Grid::new(dim, 16, 20.0).unwrap(),
            initial: InitialData {
                bump_width: 2.0,
                tensor_width: 2.0,
                seed: 7,
            },
            amplitude: 0.01,
            horizon: 1.0,
            dt: 0.1,
            exponents: AggregateExponents::DEFAULT_3D,
            sample_every: 2,
            dense_until: 0.0,
            nonlinear: true,
        }
    }

    #[test]
    fn default_exponents_are_in_scope_in_three_dimensions() {
        assert!(scenario(3).scope_warnings().is_empty());
        let w = scenario(2).scope_warnings();
        assert!(w.iter().any(|s| s.contains("3 <= N <= 7")));
        assert!(w.iter().all(|s| s.starts_with("outside theorem scope")));
    }

    #[test]
    fn hard_errors() {
        let mut s = scenario(3);
        s.dt = 0.0;
        assert!(s.check().is_err());
        let mut s = scenario(3);
        s.sample_every = 0;
        assert!(s.check().is_err());
        assert!(scenario(3).check().is_ok());
    }

    #[test]
    fn initial_momentum_has_no_mean() {
        let s = scenario(2);
        let e = SpectralEngine::new(s.grid);
        let st = s.initial_state(&e).unwrap();
        assert!(st.m.iter().all(|c| c[0].norm() == 0.0));
        assert!(st.theta[0].re > 0.0);
        assert!(st.conjugate_symmetry_defect() < 1e-13);
    }
}
