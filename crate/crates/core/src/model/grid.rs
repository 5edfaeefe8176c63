use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ModelError;

pub const MAX_DIM: usize = 4;

/// Uniform periodic grid on the box `[0, L)^N` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    box_len: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, box_len: f64) -> Result<Self, ModelError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(ModelError::ConstraintViolation("1 <= dim <= 4"));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(ModelError::ConstraintViolation("n is a power of two >= 2"));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(ModelError::ConstraintViolation("box_len > 0"));
        }
        if n.checked_pow(dim as u32).is_none() {
            return Err(ModelError::ConstraintViolation("n^dim fits in memory"));
        }
        Ok(Self { dim, n, box_len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn box_len(&self) -> f64 {
        self.box_len
    }
    pub fn spacing(&self) -> f64 {
        self.box_len / self.n as f64
    }
    /// Total number of grid points (equivalently, Fourier modes).
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn volume(&self) -> f64 {
        self.box_len.powi(self.dim as i32)
    }
    /// Quadrature weight `h^N` of a single grid point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }
    /// Fundamental wavenumber `2 pi / L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.box_len
    }
    /// Largest resolved wavenumber along one axis, `pi n / L`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.box_len
    }

    /// Signed alias of a per-axis index, in `[-n/2, n/2)`.
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis wavenumber `(2 pi / L) k'`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.fundamental() * self.signed_index(i) as f64
    }

    /// Wavenumber used by Fourier multipliers: identical to [`Grid::wavenumber`]
    /// except at the Nyquist index, where it is zero so that every multiplier
    /// maps conjugate-symmetric coefficients to conjugate-symmetric ones.
    pub fn multiplier_wavenumber(&self, i: usize) -> f64 {
        if self.is_nyquist(i) {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    /// Per-axis multiplier wavenumbers, indexed by the axis index.
    pub fn multiplier_axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.multiplier_wavenumber(i)).collect()
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for d in (0..self.dim).rev() {
            out[d] = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Flat index of the mode at `-xi` for the mode at `flat`.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx);
        for i in idx.iter_mut().take(self.dim) {
            *i = (self.n - *i) % self.n;
        }
        self.flatten(&idx)
    }

    /// Wavevector of the mode at `flat`, written into `out[..dim]`.
    pub fn wavevector(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx);
        for d in 0..self.dim {
            out[d] = self.wavenumber(idx[d]);
        }
    }

    /// Multiplier wavevector of the mode at `flat` (Nyquist components zeroed).
    pub fn multiplier_wavevector(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx);
        for d in 0..self.dim {
            out[d] = self.multiplier_wavenumber(idx[d]);
        }
    }

    /// Physical coordinate of the point at `flat`, box origin at zero.
    pub fn position(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx);
        let h = self.spacing();
        for d in 0..self.dim {
            out[d] = idx[d] as f64 * h;
        }
    }

    pub fn center(&self) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        for v in c.iter_mut().take(self.dim) {
            *v = 0.5 * self.box_len;
        }
        c
    }

    /// Minimum-image squared distance between two points of the box.
    pub fn periodic_dist_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        let l = self.box_len;
        (0..self.dim)
            .map(|d| {
                let mut dx = (a[d] - b[d]).rem_euclid(l);
                if dx > 0.5 * l {
                    dx -= l;
                }
                dx * dx
            })
            .sum()
    }

    /// `true` when the mode survives 2/3-rule truncation on every axis.
    pub fn dealias_keep(&self, flat: usize) -> bool {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx);
        (0..self.dim).all(|d| 3 * self.signed_index(idx[d]).unsigned_abs() < self.n as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(0, 8, 1.0).is_err());
        assert!(Grid::new(5, 8, 1.0).is_err());
        assert!(Grid::new(2, 12, 1.0).is_err());
        assert!(Grid::new(2, 8, -1.0).is_err());
    }

    #[test]
    fn signed_alias_range() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.signed_index(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.wavenumber(5), -3.0);
        assert_eq!(g.multiplier_wavenumber(4), 0.0);
    }

    #[test]
    fn index_map_is_bijection() {
        let g = Grid::new(3, 4, 1.0).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut idx = [0usize; MAX_DIM];
        let mut k = [0.0; MAX_DIM];
        for flat in 0..g.len() {
            g.unflatten(flat, &mut idx);
            assert_eq!(g.flatten(&idx), flat);
            g.wavevector(flat, &mut k);
            let key: Vec<i64> = k[..3].iter().map(|v| (v / g.fundamental()).round() as i64).collect();
            assert!(seen.insert(key));
            assert_eq!(g.conjugate_index(g.conjugate_index(flat)), flat);
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn dealias_keeps_two_thirds() {
        let g = Grid::new(1, 32, 1.0).unwrap();
        let kept = (0..32).filter(|&i| g.dealias_keep(i)).count();
        assert_eq!(kept, 21);
    }
}
