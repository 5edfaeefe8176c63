use num_complex::Complex64;

use super::{Grid, ModelError};

/// Real-space unknowns: density perturbation `theta = rho - rho_ref` and
/// momentum `m = rho u`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub grid: Grid,
    pub theta: Vec<f64>,
    pub m: Vec<Vec<f64>>,
}

/// Fourier coefficients of a [`State`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub grid: Grid,
    pub theta: Vec<Complex64>,
    pub m: Vec<Vec<Complex64>>,
}

/// Rank-two tensor field stored component-wise, row-major in `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub dim: usize,
    pub comps: Vec<Vec<f64>>,
}

impl TensorField {
    pub fn zeros(grid: &Grid) -> Self {
        let dim = grid.dim();
        Self {
            dim,
            comps: vec![vec![0.0; grid.len()]; dim * dim],
        }
    }

    pub fn get(&self, j: usize, k: usize) -> &[f64] {
        &self.comps[j * self.dim + k]
    }

    pub fn get_mut(&mut self, j: usize, k: usize) -> &mut Vec<f64> {
        &mut self.comps[j * self.dim + k]
    }

    /// Largest pointwise asymmetry `|T_jk - T_kj|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.dim {
            for k in (j + 1)..self.dim {
                for (a, b) in self.get(j, k).iter().zip(self.get(k, j)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }

    /// Pointwise trace.
    pub fn trace(&self) -> Vec<f64> {
        let n = self.comps[0].len();
        (0..n)
            .map(|i| (0..self.dim).map(|j| self.get(j, j)[i]).sum())
            .collect()
    }
}

impl State {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            theta: vec![0.0; n],
            m: vec![vec![0.0; n]; grid.dim()],
        }
    }

    pub fn new(grid: Grid, theta: Vec<f64>, m: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = grid.len();
        if theta.len() != n || m.len() != grid.dim() || m.iter().any(|c| c.len() != n) {
            return Err(ModelError::GridMismatch);
        }
        let state = Self { grid, theta, m };
        if !state.is_finite() {
            return Err(ModelError::NonFinite);
        }
        Ok(state)
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|v| v.is_finite()) && self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Extremes of `rho_ref + theta` over the grid.
    pub fn density_range(&self, rho_ref: f64) -> (f64, f64) {
        self.theta.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(rho_ref + t), hi.max(rho_ref + t))
        })
    }

    /// Range condition `rho_ref/4 <= rho_ref + theta <= 4 rho_ref` at every point.
    pub fn is_admissible(&self, rho_ref: f64) -> bool {
        let (lo, hi) = self.density_range(rho_ref);
        lo >= 0.25 * rho_ref && hi <= 4.0 * rho_ref
    }

    pub fn mean_theta(&self) -> f64 {
        self.theta.iter().sum::<f64>() / self.theta.len() as f64
    }
}

impl SpectralState {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            theta: vec![Complex64::new(0.0, 0.0); n],
            m: vec![vec![Complex64::new(0.0, 0.0); n]; grid.dim()],
        }
    }

    fn components(&self) -> impl Iterator<Item = &Vec<Complex64>> {
        std::iter::once(&self.theta).chain(self.m.iter())
    }

    fn components_mut(&mut self) -> impl Iterator<Item = &mut Vec<Complex64>> {
        std::iter::once(&mut self.theta).chain(self.m.iter_mut())
    }

    pub fn max_abs(&self) -> f64 {
        self.components()
            .flatten()
            .fold(0.0, |acc: f64, c| acc.max(c.norm()))
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over all components, relative to the
    /// largest coefficient.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for comp in self.components() {
            for (flat, c) in comp.iter().enumerate() {
                let partner = comp[self.grid.conjugate_index(flat)];
                worst = worst.max((partner - c.conj()).norm());
            }
        }
        worst / scale
    }

    pub fn add_assign(&mut self, other: &SpectralState) {
        for (a, b) in self.components_mut().zip(other.components()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for comp in self.components_mut() {
            for x in comp.iter_mut() {
                *x *= s;
            }
        }
    }

    /// Largest coefficient difference relative to the largest coefficient of `self`.
    pub fn relative_max_diff(&self, other: &SpectralState) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.components().zip(other.components()) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).norm());
            }
        }
        worst / scale
    }

    /// Zeroes every mode removed by the 2/3 rule.
    pub fn dealias(&mut self) {
        let grid = self.grid;
        for comp in self.components_mut() {
            for (flat, c) in comp.iter_mut().enumerate() {
                if !grid.dealias_keep(flat) {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}
