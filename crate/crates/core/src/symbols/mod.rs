//! Closed-form Fourier symbols of the linearized system
//!
//! ```text
//! d/dt theta + div m = 0
//! d/dt m - alpha Lap m - beta grad div m - kappa rho_ref grad Lap theta = 0
//! ```
//!
//! On each mode `xi` the system is a linear ODE on `(theta_hat, m_hat)`.
//! Its solution operator splits into the transverse heat block
//! `exp(-alpha |xi|^2 t) (I - xi xi^T / |xi|^2)` and a 2x2 block on
//! `(theta_hat, xi . m_hat)` whose eigenvalues are
//! `lambda_pm = -((alpha + beta)/2) |xi|^2 +- sqrt(delta) |xi|^2`.

mod expm;
mod oracle;
mod verify;

pub use expm::expm;
pub use oracle::{matexp_oracle, ode_oracle};
pub use verify::{
    degeneracy_sweep, params_with_discriminant, random_case, verify_symbols, DegeneracySweep, RegimeCheck,
    SymbolCase,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::FluidParams;

/// Relative width of the band around `delta = 0` treated as degenerate.
pub const TOL_DEG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `delta > 0`: two real eigenvalues.
    PositiveReal,
    /// `delta < 0`: complex-conjugate eigenvalues.
    NegativeOscillatory,
    /// `delta = 0` within [`TOL_DEG`]: a double eigenvalue.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discriminant {
    pub value: f64,
    pub regime: Regime,
}

impl Discriminant {
    pub fn of(params: &FluidParams) -> Self {
        let value = params.delta();
        let scale = 0.25 * (params.alpha() + params.beta()).powi(2);
        let regime = if value.abs() <= TOL_DEG * scale {
            Regime::Degenerate
        } else if value > 0.0 {
            Regime::PositiveReal
        } else {
            Regime::NegativeOscillatory
        };
        Self { value, regime }
    }
}

pub fn discriminant(params: &FluidParams) -> Discriminant {
    Discriminant::of(params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigenvalues {
    Pair(Complex64, Complex64),
    Double(f64),
}

/// Eigenvalues of the `(theta_hat, xi . m_hat)` block at `|xi|^2 = xi_sq`.
pub fn eigenvalues(params: &FluidParams, xi_sq: f64) -> Eigenvalues {
    let disc = Discriminant::of(params);
    let center = -0.5 * (params.alpha() + params.beta()) * xi_sq;
    match disc.regime {
        Regime::Degenerate => Eigenvalues::Double(center),
        Regime::PositiveReal => {
            let s = disc.value.sqrt() * xi_sq;
            Eigenvalues::Pair(Complex64::new(center + s, 0.0), Complex64::new(center - s, 0.0))
        }
        Regime::NegativeOscillatory => {
            let w = (-disc.value).sqrt() * xi_sq;
            Eigenvalues::Pair(Complex64::new(center, w), Complex64::new(center, -w))
        }
    }
}

/// Scalar coefficients of the per-mode solution operator.
///
/// With `P = xi xi^T / |xi|^2` the operator reads
///
/// ```text
/// theta(t) = theta_f * f  - i (xi . g) * coupling
/// m(t)     = -i xi f * capillary + transverse (I - P) g + longitudinal P g
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolBlocks {
    pub theta_f: f64,
    pub coupling: f64,
    pub capillary: f64,
    pub longitudinal: f64,
    pub transverse: f64,
}

impl SymbolBlocks {
    pub const IDENTITY: SymbolBlocks = SymbolBlocks {
        theta_f: 1.0,
        coupling: 0.0,
        capillary: 0.0,
        longitudinal: 1.0,
        transverse: 1.0,
    };
}

/// `(cosh r, sinh r / r)` with `r^2 = y`, continued through `y < 0` as
/// `(cos r, sin r / r)`.
fn even_odd(y: f64) -> (f64, f64) {
    if y.abs() < 1.0 {
        let (mut even, mut odd, mut term) = (0.0, 0.0, 1.0);
        for n in 0..12 {
            // term = y^n / (2n)!
            even += term;
            odd += term / (2 * n + 1) as f64;
            term *= y / ((2 * n + 1) * (2 * n + 2)) as f64;
        }
        (even, odd)
    } else if y > 0.0 {
        let r = y.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-y).sqrt();
        (r.cos(), r.sin() / r)
    }
}

/// Precomputed coefficients for evaluating [`SymbolBlocks`] on many modes.
#[derive(Debug, Clone, Copy)]
pub struct SymbolKernel {
    alpha: f64,
    half_sum: f64,
    capillarity: f64,
    root: f64,
    delta: f64,
    regime: Regime,
}

impl SymbolKernel {
    pub fn new(params: &FluidParams) -> Self {
        let disc = Discriminant::of(params);
        Self {
            alpha: params.alpha(),
            half_sum: 0.5 * (params.alpha() + params.beta()),
            capillarity: params.capillarity(),
            root: disc.value.abs().sqrt(),
            delta: disc.value,
            regime: disc.regime,
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Blocks at `|xi|^2 = xi_sq` and time `t >= 0`.
    pub fn blocks(&self, xi_sq: f64, t: f64) -> SymbolBlocks {
        if xi_sq == 0.0 || t == 0.0 {
            return SymbolBlocks {
                coupling: if xi_sq == 0.0 { t } else { 0.0 },
                ..SymbolBlocks::IDENTITY
            };
        }
        let a = -self.half_sum * xi_sq;
        let transverse = (-self.alpha * xi_sq * t).exp();
        match self.regime {
            Regime::Degenerate => {
                // expansion about the double root a, exact in the small signed delta
                let (even, odd) = even_odd(self.delta * xi_sq * xi_sq * t * t);
                let e = (a * t).exp();
                let coupling = e * t * odd;
                SymbolBlocks {
                    theta_f: e * even - a * coupling,
                    coupling,
                    capillary: self.capillarity * xi_sq * coupling,
                    longitudinal: e * even + a * coupling,
                    transverse,
                }
            }
            Regime::PositiveReal => {
                // lambda_pm = a +- s; written with e_plus = exp(lambda_+ t)
                // so that nothing overflows for large |xi|^2 t.
                let s = self.root * xi_sq;
                let e_plus = ((a + s) * t).exp();
                let ratio = (-2.0 * s * t).exp();
                let even = 0.5 * e_plus * (1.0 + ratio);
                let coupling = e_plus * (-(-2.0 * s * t).exp_m1()) / (2.0 * s);
                SymbolBlocks {
                    theta_f: even - a * coupling,
                    coupling,
                    capillary: self.capillarity * xi_sq * coupling,
                    longitudinal: even + a * coupling,
                    transverse,
                }
            }
            Regime::NegativeOscillatory => {
                let w = self.root * xi_sq;
                let e = (a * t).exp();
                let even = e * (w * t).cos();
                let coupling = e * (w * t).sin() / w;
                SymbolBlocks {
                    theta_f: even - a * coupling,
                    coupling,
                    capillary: self.capillarity * xi_sq * coupling,
                    longitudinal: even + a * coupling,
                    transverse,
                }
            }
        }
    }
}

/// Dense `(N+1) x (N+1)` complex matrix acting on `(theta_hat, m_hat)` at one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix(pub DMatrix<Complex64>);

impl ModeMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||self - other||_F / ||other||_F`
    pub fn relative_deviation(&self, other: &ModeMatrix) -> f64 {
        let diff = ModeMatrix(&self.0 - &other.0).frobenius();
        let scale = other.frobenius();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    pub fn max_entry_diff(&self, other: &ModeMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &ModeMatrix) -> ModeMatrix {
        ModeMatrix(&self.0 * &other.0)
    }
}

/// Assembles the dense matrix of [`SymbolBlocks`] at wavevector `xi`.
pub fn assemble(blocks: &SymbolBlocks, xi: &[f64]) -> ModeMatrix {
    let n = xi.len();
    let xi_sq: f64 = xi.iter().map(|v| v * v).sum();
    let i = Complex64::i();
    let mut m = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
    m[(0, 0)] = Complex64::new(blocks.theta_f, 0.0);
    for k in 0..n {
        m[(0, 1 + k)] = -i * xi[k] * blocks.coupling;
        m[(1 + k, 0)] = -i * xi[k] * blocks.capillary;
    }
    for j in 0..n {
        for k in 0..n {
            let delta = if j == k { 1.0 } else { 0.0 };
            let proj = if xi_sq > 0.0 { xi[j] * xi[k] / xi_sq } else { 0.0 };
            let v = blocks.transverse * delta + (blocks.longitudinal - blocks.transverse) * proj;
            m[(1 + j, 1 + k)] = Complex64::new(v, 0.0);
        }
    }
    ModeMatrix(m)
}

/// Solution operator `M(xi, t)` with `(theta_hat, m_hat)(t) = M (f_hat, g_hat)`.
pub fn solution_symbol(params: &FluidParams, xi: &[f64], t: f64) -> ModeMatrix {
    let xi_sq: f64 = xi.iter().map(|v| v * v).sum();
    let blocks = SymbolKernel::new(params).blocks(xi_sq, t);
    assemble(&blocks, xi)
}

/// Generator `A(xi)` with `d/dt (theta_hat, m_hat) = A (theta_hat, m_hat)`.
pub fn generator_matrix(params: &FluidParams, xi: &[f64]) -> ModeMatrix {
    let n = xi.len();
    let xi_sq: f64 = xi.iter().map(|v| v * v).sum();
    let i = Complex64::i();
    let mut a = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
    for k in 0..n {
        a[(0, 1 + k)] = -i * xi[k];
        a[(1 + k, 0)] = -i * params.capillarity() * xi_sq * xi[k];
    }
    for j in 0..n {
        for k in 0..n {
            let diag = if j == k { params.alpha() * xi_sq } else { 0.0 };
            a[(1 + j, 1 + k)] = Complex64::new(-diag - params.beta() * xi[j] * xi[k], 0.0);
        }
    }
    ModeMatrix(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64, kr: f64) -> FluidParams {
        FluidParams::with_quadratic_pressure(alpha, beta, kr, 1.0, 1.0).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminant(&params(3.0, 1.0, 1.0));
        assert_eq!(d.value, 3.0);
        assert_eq!(d.regime, Regime::PositiveReal);
        let d = discriminant(&params(1.0, 1.0, 1.0));
        assert_eq!(d.value, 0.0);
        assert_eq!(d.regime, Regime::Degenerate);
        let d = discriminant(&params(1.0, 0.0, 1.0));
        assert_eq!(d.value, -0.75);
        assert_eq!(d.regime, Regime::NegativeOscillatory);
    }

    #[test]
    fn eigenvalue_examples() {
        match eigenvalues(&params(3.0, 1.0, 1.0), 1.0) {
            Eigenvalues::Pair(p, m) => {
                assert!((p.re - (-2.0 + 3f64.sqrt())).abs() < 1e-15);
                assert!((m.re - (-2.0 - 3f64.sqrt())).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        match eigenvalues(&params(3.0, 1.0, 1.0), 0.0) {
            Eigenvalues::Pair(p, m) => assert!(p.norm() == 0.0 && m.norm() == 0.0),
            other => panic!("{other:?}"),
        }
        match eigenvalues(&params(1.0, 0.0, 1.0), 2.5) {
            Eigenvalues::Pair(p, m) => {
                assert_eq!(p.re, -0.5 * 2.5);
                assert_eq!(m.re, -0.5 * 2.5);
                assert_eq!(p.im, -m.im);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_at_time_zero_and_zero_frequency() {
        for p in [params(3.0, 1.0, 1.0), params(1.0, 1.0, 1.0), params(1.0, 0.0, 1.0)] {
            let id = ModeMatrix(DMatrix::identity(4, 4));
            assert_eq!(solution_symbol(&p, &[0.3, -1.2, 0.5], 0.0), id);
            assert_eq!(solution_symbol(&p, &[0.0, 0.0, 0.0], 7.5), id);
        }
    }

    #[test]
    fn generator_zero_and_trace() {
        let p = params(2.0, 0.5, 1.3);
        let z = generator_matrix(&p, &[0.0, 0.0]);
        assert!(z.0.iter().all(|c| c.norm() == 0.0));
        let xi = [0.7, -1.1, 0.4];
        let a = generator_matrix(&p, &xi);
        let xi_sq: f64 = xi.iter().map(|v| v * v).sum();
        let tr: Complex64 = (0..4).map(|i| a.0[(i, i)]).sum();
        assert!((tr.re + (p.alpha() * 3.0 + p.beta()) * xi_sq).abs() < 1e-13);
        assert_eq!(tr.im, 0.0);
    }

    #[test]
    fn longitudinal_block_eigenvalues_match() {
        // 2x2 block on (theta, xi_hat . m) in the real coordinates (theta, -i xi_hat . m)
        for p in [params(3.0, 1.0, 1.0), params(1.0, 0.0, 1.0), params(1.0, 1.0, 1.0)] {
            let k = 1.3f64;
            let b = nalgebra::Matrix2::new(
                0.0,
                k,
                -p.capillarity() * k.powi(3),
                -(p.alpha() + p.beta()) * k * k,
            );
            let mut got: Vec<Complex64> = b
                .complex_eigenvalues()
                .iter()
                .copied()
                .collect();
            let mut want = match eigenvalues(&p, k * k) {
                Eigenvalues::Pair(a, b) => vec![a, b],
                Eigenvalues::Double(l) => vec![Complex64::new(l, 0.0); 2],
            };
            let key = |c: &Complex64| (c.re * 1e6).round() as i64 * 1_000_000 + (c.im * 1e6).round() as i64;
            got.sort_by_key(key);
            want.sort_by_key(key);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < 1e-6, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn transverse_block_is_heat_kernel() {
        let p = params(1.7, 0.4, 2.0);
        let xi = [0.0, 1.5, 0.0];
        let t = 0.8;
        let m = solution_symbol(&p, &xi, t);
        let heat = (-p.alpha() * 2.25 * t).exp();
        assert!((m.0[(1, 1)].re - heat).abs() <= 1e-12 * heat);
        assert!((m.0[(3, 3)].re - heat).abs() <= 1e-12 * heat);
    }

    #[test]
    fn conjugate_symmetry_of_symbol() {
        let p = params(1.0, 0.2, 3.0);
        let a = solution_symbol(&p, &[0.4, -0.9], 1.7);
        let b = solution_symbol(&p, &[-0.4, 0.9], 1.7);
        for (x, y) in a.0.iter().zip(b.0.iter()) {
            assert_eq!(*x, y.conj());
        }
    }
}
