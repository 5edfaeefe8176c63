use num_complex::Complex64;
use rayon::prelude::*;

use super::{Cutoff, FftNd, SpectralError, MAX_DERIVATIVE_ORDER};
use crate::model::{FluidParams, Grid, SpectralState, State, TensorField, MAX_DIM};
use crate::symbols::SymbolKernel;

/// Transform engine bound to one grid. Read-only after construction.
#[derive(Debug, Clone)]
pub struct SpectralEngine {
    grid: Grid,
    fft: FftNd,
    kaxis: Vec<f64>,
}

impl SpectralEngine {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            fft: FftNd::new(grid),
            kaxis: grid.multiplier_axis(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Multiplier wavevector of mode `flat` into `out`; returns `|xi|^2`.
    #[inline]
    pub fn mode(&self, flat: usize, out: &mut [f64; MAX_DIM]) -> f64 {
        let n = self.grid.n();
        let mut rest = flat;
        let mut sq = 0.0;
        for d in (0..self.grid.dim()).rev() {
            let k = self.kaxis[rest % n];
            rest /= n;
            out[d] = k;
            sq += k * k;
        }
        sq
    }

    pub fn forward_real(&self, field: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    fn check(&self, grid: &Grid) -> Result<(), SpectralError> {
        if *grid != self.grid {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    pub fn to_spectral(&self, state: &State) -> Result<SpectralState, SpectralError> {
        self.check(&state.grid)?;
        Ok(SpectralState {
            grid: self.grid,
            theta: self.forward_real(&state.theta),
            m: state.m.iter().map(|c| self.forward_real(c)).collect(),
        })
    }

    pub fn to_real(&self, spectral: &SpectralState) -> Result<State, SpectralError> {
        self.check(&spectral.grid)?;
        Ok(State {
            grid: self.grid,
            theta: self.inverse_real(&spectral.theta),
            m: spectral.m.iter().map(|c| self.inverse_real(c)).collect(),
        })
    }

    /// Exact linear propagation: multiplies every mode by the solution symbol at time `t`.
    pub fn apply_semigroup(
        &self,
        spectral: &SpectralState,
        params: &FluidParams,
        t: f64,
    ) -> Result<SpectralState, SpectralError> {
        self.check(&spectral.grid)?;
        let kernel = SymbolKernel::new(params);
        let dim = self.grid.dim();
        let len = self.grid.len();
        let mut theta = vec![Complex64::default(); len];
        let mut m_flat = vec![Complex64::default(); len * dim];
        theta
            .par_iter_mut()
            .zip(m_flat.par_chunks_mut(dim))
            .enumerate()
            .for_each(|(flat, (th_out, m_out))| {
                let mut xi = [0.0; MAX_DIM];
                let xi_sq = self.mode(flat, &mut xi);
                let th = spectral.theta[flat];
                if xi_sq == 0.0 {
                    *th_out = th;
                    for d in 0..dim {
                        m_out[d] = spectral.m[d][flat];
                    }
                    return;
                }
                let b = kernel.blocks(xi_sq, t);
                let mut xi_dot_g = Complex64::default();
                for d in 0..dim {
                    xi_dot_g += spectral.m[d][flat] * xi[d];
                }
                let minus_i = Complex64::new(0.0, -1.0);
                *th_out = th * b.theta_f + minus_i * xi_dot_g * b.coupling;
                let proj = xi_dot_g * ((b.longitudinal - b.transverse) / xi_sq);
                let cap = minus_i * th * b.capillary;
                for d in 0..dim {
                    m_out[d] = cap * xi[d] + spectral.m[d][flat] * b.transverse + proj * xi[d];
                }
            });
        let m = (0..dim)
            .map(|d| m_flat.iter().skip(d).step_by(dim).copied().collect())
            .collect();
        Ok(SpectralState {
            grid: self.grid,
            theta,
            m,
        })
    }

    /// Splits into `(phi * x, (1 - phi) * x)`.
    pub fn frequency_split(
        &self,
        spectral: &SpectralState,
        cutoff: &Cutoff,
    ) -> Result<(SpectralState, SpectralState), SpectralError> {
        self.check(&spectral.grid)?;
        let fundamental = self.grid.fundamental();
        if 2.0 * cutoff.eps < fundamental {
            return Err(SpectralError::EmptyLowBand {
                eps: cutoff.eps,
                fundamental,
            });
        }
        let weights: Vec<f64> = (0..self.grid.len())
            .into_par_iter()
            .map(|flat| {
                let mut xi = [0.0; MAX_DIM];
                cutoff.phi(self.mode(flat, &mut xi).sqrt())
            })
            .collect();
        let split = |c: &Vec<Complex64>, low: bool| -> Vec<Complex64> {
            c.iter()
                .zip(&weights)
                .map(|(v, w)| if low { v * *w } else { v * (1.0 - *w) })
                .collect()
        };
        let low = SpectralState {
            grid: self.grid,
            theta: split(&spectral.theta, true),
            m: spectral.m.iter().map(|c| split(c, true)).collect(),
        };
        let high = SpectralState {
            grid: self.grid,
            theta: split(&spectral.theta, false),
            m: spectral.m.iter().map(|c| split(c, false)).collect(),
        };
        Ok((low, high))
    }

    /// Multiplies coefficients by `(i xi)^alpha`.
    pub fn derivative_spectral(
        &self,
        coeffs: &[Complex64],
        alpha: &[u32],
    ) -> Result<Vec<Complex64>, SpectralError> {
        let order: u32 = alpha.iter().sum();
        if order > MAX_DERIVATIVE_ORDER {
            return Err(SpectralError::DerivativeOrder(order));
        }
        if coeffs.len() != self.grid.len() || alpha.len() != self.grid.dim() {
            return Err(SpectralError::GridMismatch);
        }
        if order == 0 {
            return Ok(coeffs.to_vec());
        }
        let i_pow = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(order % 4) as usize];
        Ok(coeffs
            .par_iter()
            .enumerate()
            .map(|(flat, c)| {
                let mut xi = [0.0; MAX_DIM];
                self.mode(flat, &mut xi);
                let mut factor = 1.0;
                for (d, &a) in alpha.iter().enumerate() {
                    factor *= xi[d].powi(a as i32);
                }
                c * i_pow * factor
            })
            .collect())
    }

    /// `d^alpha field`, `|alpha| <= 3`.
    pub fn derivative(&self, field: &[f64], alpha: &[u32]) -> Result<Vec<f64>, SpectralError> {
        if field.len() != self.grid.len() {
            return Err(SpectralError::GridMismatch);
        }
        let hat = self.derivative_spectral(&self.forward_real(field), alpha)?;
        Ok(self.inverse_real(&hat))
    }

    /// `Div M`: the `j`-th component is `sum_k d_k M_jk`.
    pub fn divergence_form_momentum(&self, tensor: &TensorField) -> Result<Vec<Vec<f64>>, SpectralError> {
        let dim = self.grid.dim();
        if tensor.dim != dim {
            return Err(SpectralError::GridMismatch);
        }
        let hat: Vec<Vec<Complex64>> = tensor.comps.iter().map(|c| self.forward_real(c)).collect();
        Ok(self
            .divergence_spectral(&hat)
            .iter()
            .map(|c| self.inverse_real(c))
            .collect())
    }

    /// Spectral divergence of a row-major tensor given by its coefficients.
    pub fn divergence_spectral(&self, hat: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let dim = self.grid.dim();
        (0..dim)
            .map(|j| {
                (0..self.grid.len())
                    .into_par_iter()
                    .map(|flat| {
                        let mut xi = [0.0; MAX_DIM];
                        self.mode(flat, &mut xi);
                        let mut acc = Complex64::default();
                        for k in 0..dim {
                            acc += hat[j * dim + k][flat] * xi[k];
                        }
                        acc * Complex64::i()
                    })
                    .collect()
            })
            .collect()
    }

    /// Zeroes coefficients removed by the 2/3 rule.
    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        let grid = self.grid;
        coeffs.par_iter_mut().enumerate().for_each(|(flat, c)| {
            if !grid.dealias_keep(flat) {
                *c = Complex64::default();
            }
        });
    }

    /// Real-space field projected onto the 2/3-rule band.
    pub fn dealias_real(&self, field: &[f64]) -> Vec<f64> {
        let mut hat = self.forward_real(field);
        self.dealias(&mut hat);
        self.inverse_real(&hat)
    }
}
