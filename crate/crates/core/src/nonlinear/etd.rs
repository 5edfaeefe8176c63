use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::tensors::nonlinearity_spectral;
use super::NonlinearError;
use crate::model::{FluidParams, SpectralState, State, MAX_DIM};
use crate::spectral::SpectralEngine;
use crate::symbols::expm;

/// `phi_1` and `phi_2` of the longitudinal 2x2 block and of the transverse
/// scalar at one value of `|xi|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PhiPair {
    // second columns of phi_1(hB) and phi_2(hB) in (theta, v) coordinates,
    // v = -i xi_hat . m_hat; forcing never enters the density row directly
    long1: [f64; 2],
    long2: [f64; 2],
    trans1: f64,
    trans2: f64,
}

impl PhiPair {
    const ZERO_MODE: PhiPair = PhiPair {
        long1: [0.0, 1.0],
        long2: [0.0, 0.5],
        trans1: 1.0,
        trans2: 0.5,
    };
}

/// `phi_1(z) = (e^z - 1)/z`, `phi_2(z) = (e^z - 1 - z)/z^2`.
fn scalar_phis(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        // Taylor series, truncation error below 1e-16 at |z| = 0.1
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        let mut term = 1.0;
        for n in 0..14 {
            // term = z^n / n!
            p1 += term / (n + 1) as f64;
            p2 += term / ((n + 1) * (n + 2)) as f64;
            term *= z / (n + 1) as f64;
        }
        (p1, p2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

fn mode_phis(params: &FluidParams, xi_sq: f64, h: f64) -> PhiPair {
    if xi_sq == 0.0 {
        return PhiPair::ZERO_MODE;
    }
    let k = xi_sq.sqrt();
    let c = |v: f64| Complex64::new(v, 0.0);
    // augmented matrix [[hB, I, 0], [0, 0, I], [0, 0, 0]]
    let mut aug = DMatrix::<Complex64>::zeros(6, 6);
    aug[(0, 1)] = c(h * k);
    aug[(1, 0)] = c(-h * params.capillarity() * k * xi_sq);
    aug[(1, 1)] = c(-h * (params.alpha() + params.beta()) * xi_sq);
    for i in 0..4 {
        aug[(i, i + 2)] = c(1.0);
    }
    let ex = expm(&aug);
    let (trans1, trans2) = scalar_phis(-h * params.alpha() * xi_sq);
    PhiPair {
        long1: [ex[(0, 3)].re, ex[(1, 3)].re],
        long2: [ex[(0, 5)].re, ex[(1, 5)].re],
        trans1,
        trans2,
    }
}

/// Second-order exponential time differencing (Cox-Matthews ETDRK2):
///
/// `a = E u + h phi_1 G(u)`, `u+ = a + h phi_2 (G(a) - G(u))`
///
/// with `E` the exact solution operator over one step and `G = (0, g)`.
#[derive(Debug, Clone)]
pub struct Integrator {
    engine: SpectralEngine,
    params: FluidParams,
    dt: f64,
    nonlinear: bool,
    table: Vec<PhiPair>,
    index: Vec<u32>,
}

#[derive(Clone, Copy)]
enum Phi {
    One,
    Two,
}

impl Integrator {
    pub fn new(engine: SpectralEngine, params: FluidParams, dt: f64, nonlinear: bool) -> Result<Self, NonlinearError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NonlinearError::InvalidScenario(format!("time step must be positive, got {dt}")));
        }
        let len = engine.grid().len();
        let mut lookup: HashMap<u64, u32> = HashMap::new();
        let mut values: Vec<f64> = Vec::new();
        let mut index = Vec::with_capacity(len);
        let mut xi = [0.0; MAX_DIM];
        for flat in 0..len {
            let k2 = engine.mode(flat, &mut xi);
            let slot = *lookup.entry(k2.to_bits()).or_insert_with(|| {
                values.push(k2);
                (values.len() - 1) as u32
            });
            index.push(slot);
        }
        let table = values.par_iter().map(|&k2| mode_phis(&params, k2, dt)).collect();
        Ok(Self {
            engine,
            params,
            dt,
            nonlinear,
            table,
            index,
        })
    }

    pub fn engine(&self) -> &SpectralEngine {
        &self.engine
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    /// Coefficients of `g` at `state`; zero when the nonlinearity is disabled.
    pub fn forcing(&self, state: &SpectralState) -> Result<Vec<Vec<Complex64>>, NonlinearError> {
        if self.nonlinear {
            nonlinearity_spectral(&self.engine, state, &self.params)
        } else {
            Ok(vec![vec![Complex64::default(); state.theta.len()]; state.m.len()])
        }
    }

    /// Adds `h phi(hL) (0, g)` to `state`.
    fn add_forcing(&self, state: &mut SpectralState, g: &[Vec<Complex64>], which: Phi) {
        let dim = self.engine.grid().dim();
        let h = self.dt;
        let i = Complex64::i();
        let updates: Vec<(Complex64, [Complex64; MAX_DIM])> = (0..state.theta.len())
            .into_par_iter()
            .map(|flat| {
                let mut xi = [0.0; MAX_DIM];
                let k2 = self.engine.mode(flat, &mut xi);
                let phi = self.table[self.index[flat] as usize];
                let (long, trans) = match which {
                    Phi::One => (phi.long1, phi.trans1),
                    Phi::Two => (phi.long2, phi.trans2),
                };
                let mut dm = [Complex64::default(); MAX_DIM];
                if k2 == 0.0 {
                    for d in 0..dim {
                        dm[d] = g[d][flat] * (h * trans);
                    }
                    return (Complex64::default(), dm);
                }
                let k = k2.sqrt();
                let mut along = Complex64::default();
                for d in 0..dim {
                    along += g[d][flat] * (xi[d] / k);
                }
                let gv = -i * along;
                let dtheta = gv * (h * long[0]);
                let dv = gv * (h * long[1]);
                for d in 0..dim {
                    let xh = xi[d] / k;
                    let transverse = g[d][flat] - along * xh;
                    dm[d] = i * dv * xh + transverse * (h * trans);
                }
                (dtheta, dm)
            })
            .collect();
        for (flat, (dt, dm)) in updates.into_iter().enumerate() {
            state.theta[flat] += dt;
            for d in 0..dim {
                state.m[d][flat] += dm[d];
            }
        }
    }

    /// One step; `g_now` may carry the forcing already evaluated at `state`.
    pub fn step_with(
        &self,
        state: &SpectralState,
        g_now: Option<Vec<Vec<Complex64>>>,
    ) -> Result<SpectralState, NonlinearError> {
        let mut next = self.engine.apply_semigroup(state, &self.params, self.dt)?;
        if !self.nonlinear {
            return Ok(next);
        }
        let g_u = match g_now {
            Some(g) => g,
            None => self.forcing(state)?,
        };
        self.add_forcing(&mut next, &g_u, Phi::One);
        let g_a = self.forcing(&next)?;
        let diff: Vec<Vec<Complex64>> = g_a
            .iter()
            .zip(&g_u)
            .map(|(a, u)| a.iter().zip(u).map(|(x, y)| x - y).collect())
            .collect();
        self.add_forcing(&mut next, &diff, Phi::Two);
        Ok(next)
    }

    pub fn step(&self, state: &SpectralState) -> Result<SpectralState, NonlinearError> {
        self.step_with(state, None)
    }
}

/// One step on real fields. The new state must satisfy the range condition.
pub fn step(state: &State, params: &FluidParams, dt: f64) -> Result<State, NonlinearError> {
    let engine = SpectralEngine::new(state.grid);
    let integrator = Integrator::new(engine.clone(), params.clone(), dt, true)?;
    let mut spectral = engine.to_spectral(state)?;
    spectral.dealias();
    let next = integrator.step(&spectral).map_err(|e| NonlinearError::StepRejected {
        time: dt,
        reason: e.to_string(),
    })?;
    let out = engine.to_real(&next)?;
    if !out.is_finite() || !out.is_admissible(params.rho_ref()) {
        let (lo, hi) = out.density_range(params.rho_ref());
        return Err(NonlinearError::StepRejected {
            time: dt,
            reason: format!("density range [{lo}, {hi}] leaves the admissible window"),
        });
    }
    Ok(out)
}
