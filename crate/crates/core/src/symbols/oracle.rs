//! Brute-force references for the per-mode solution operator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{expm, generator_matrix, ModeMatrix};
use crate::model::FluidParams;

/// `exp(t A(xi))` by scaling and squaring.
pub fn matexp_oracle(params: &FluidParams, xi: &[f64], t: f64) -> ModeMatrix {
    let a = generator_matrix(params, xi).0 * Complex64::new(t, 0.0);
    ModeMatrix(expm(&a))
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// `exp(t A(xi))` by integrating `Y' = A Y, Y(0) = I` with adaptive
/// Dormand-Prince 5(4) steps at tolerance `tol`.
pub fn ode_oracle(params: &FluidParams, xi: &[f64], t: f64, tol: f64) -> ModeMatrix {
    let a = generator_matrix(params, xi).0;
    let n = a.nrows();
    let mut y = DMatrix::<Complex64>::identity(n, n);
    if t == 0.0 {
        return ModeMatrix(y);
    }
    let spectral_scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut h = (0.1 / spectral_scale).min(t);
    let mut s = 0.0;
    let mut k: Vec<DMatrix<Complex64>> = Vec::with_capacity(7);
    while s < t {
        if s + h > t {
            h = t - s;
        }
        k.clear();
        for stage in 0..7 {
            let mut arg = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let coeff = A[stage][j];
                if coeff != 0.0 {
                    arg += kj * Complex64::new(h * coeff, 0.0);
                }
            }
            k.push(&a * arg);
        }
        let mut y5 = y.clone();
        let mut err = DMatrix::<Complex64>::zeros(n, n);
        for (j, kj) in k.iter().enumerate() {
            y5 += kj * Complex64::new(h * B5[j], 0.0);
            err += kj * Complex64::new(h * (B5[j] - B4[j]), 0.0);
        }
        let scale = y.iter().chain(y5.iter()).map(|v| v.norm()).fold(0.0, f64::max);
        let err_norm = err.iter().map(|v| v.norm()).fold(0.0, f64::max) / (tol * scale.max(1e-300));
        if err_norm <= 1.0 {
            s += h;
            y = y5;
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    ModeMatrix(y)
}
