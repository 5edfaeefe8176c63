use num_complex::Complex64;
use rayon::prelude::*;

use super::NonlinearError;
use crate::model::{FluidParams, Grid, SpectralState, TensorField};
use crate::spectral::SpectralEngine;

// 8-point Gauss-Legendre rule on [-1, 1], positive half.
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Applies the 2/3 rule to a real field, or returns it unchanged.
struct Truncation<'a> {
    engine: &'a SpectralEngine,
    enabled: bool,
}

impl Truncation<'_> {
    fn apply(&self, field: Vec<f64>) -> Vec<f64> {
        if self.enabled {
            self.engine.dealias_real(&field)
        } else {
            field
        }
    }

    fn product(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        self.apply(a.iter().zip(b).map(|(x, y)| x * y).collect())
    }
}

fn gradient_hat(engine: &SpectralEngine, hat: &[Complex64]) -> Result<Vec<Vec<f64>>, NonlinearError> {
    let dim = engine.grid().dim();
    (0..dim)
        .map(|d| {
            let mut alpha = vec![0u32; dim];
            alpha[d] = 1;
            Ok(engine.inverse_real(&engine.derivative_spectral(hat, &alpha)?))
        })
        .collect()
}

fn laplacian_hat(engine: &SpectralEngine, hat: &[Complex64]) -> Result<Vec<f64>, NonlinearError> {
    let dim = engine.grid().dim();
    let mut acc = vec![Complex64::default(); hat.len()];
    for d in 0..dim {
        let mut alpha = vec![0u32; dim];
        alpha[d] = 2;
        for (a, v) in acc.iter_mut().zip(engine.derivative_spectral(hat, &alpha)?) {
            *a += v;
        }
    }
    Ok(engine.inverse_real(&acc))
}

fn check_vector(grid: &Grid, u: &[Vec<f64>]) -> Result<(), NonlinearError> {
    if u.len() != grid.dim() || u.iter().any(|c| c.len() != grid.len()) {
        return Err(NonlinearError::GridMismatch);
    }
    Ok(())
}

/// `mu (grad u + grad u^T) + (nu - mu) (div u) I`
pub fn viscous_tensor(
    engine: &SpectralEngine,
    u: &[Vec<f64>],
    params: &FluidParams,
) -> Result<TensorField, NonlinearError> {
    let grid = *engine.grid();
    check_vector(&grid, u)?;
    let hats: Vec<Vec<Complex64>> = u.iter().map(|c| engine.forward_real(c)).collect();
    viscous_from_hats(engine, &hats, params)
}

fn viscous_from_hats(
    engine: &SpectralEngine,
    hats: &[Vec<Complex64>],
    params: &FluidParams,
) -> Result<TensorField, NonlinearError> {
    let grid = *engine.grid();
    let dim = grid.dim();
    // grads[k][d] = d_d u_k
    let grads: Vec<Vec<Vec<f64>>> = hats
        .iter()
        .map(|h| gradient_hat(engine, h))
        .collect::<Result<_, _>>()?;
    let mut div = vec![0.0; grid.len()];
    for (d, g) in grads.iter().enumerate() {
        for (acc, v) in div.iter_mut().zip(&g[d]) {
            *acc += v;
        }
    }
    let (mu, bulk) = (params.mu(), params.nu() - params.mu());
    let mut out = TensorField::zeros(&grid);
    for j in 0..dim {
        for k in 0..dim {
            let comp = out.get_mut(j, k);
            for (i, v) in comp.iter_mut().enumerate() {
                *v = mu * (grads[k][j][i] + grads[j][k][i]);
                if j == k {
                    *v += bulk * div[i];
                }
            }
        }
    }
    Ok(out)
}

/// `kappa/2 (Lap(rho^2) - |grad rho|^2) I - kappa grad rho (x) grad rho`
pub fn korteweg_tensor(
    engine: &SpectralEngine,
    rho: &[f64],
    params: &FluidParams,
) -> Result<TensorField, NonlinearError> {
    if rho.len() != engine.grid().len() {
        return Err(NonlinearError::GridMismatch);
    }
    let hat = engine.forward_real(rho);
    korteweg_impl(
        engine,
        rho,
        &hat,
        params,
        &Truncation {
            engine,
            enabled: false,
        },
    )
}

fn korteweg_impl(
    engine: &SpectralEngine,
    rho: &[f64],
    rho_hat: &[Complex64],
    params: &FluidParams,
    trunc: &Truncation<'_>,
) -> Result<TensorField, NonlinearError> {
    let grid = *engine.grid();
    let dim = grid.dim();
    let kappa = params.kappa();
    let grad = gradient_hat(engine, rho_hat)?;
    let square = trunc.product(rho, rho);
    let lap_square = laplacian_hat(engine, &engine.forward_real(&square))?;
    let mut grad_sq = vec![0.0; grid.len()];
    let mut outer = TensorField::zeros(&grid);
    for j in 0..dim {
        for k in j..dim {
            let p = trunc.product(&grad[j], &grad[k]);
            if j == k {
                for (acc, v) in grad_sq.iter_mut().zip(&p) {
                    *acc += v;
                }
            }
            outer.get_mut(k, j).clone_from(&p);
            *outer.get_mut(j, k) = p;
        }
    }
    let mut out = TensorField::zeros(&grid);
    for j in 0..dim {
        for k in 0..dim {
            let src = outer.get(j, k).to_vec();
            let comp = out.get_mut(j, k);
            for (i, v) in comp.iter_mut().enumerate() {
                *v = -kappa * src[i];
                if j == k {
                    *v += 0.5 * kappa * (lap_square[i] - grad_sq[i]);
                }
            }
        }
    }
    Ok(out)
}

/// `int_0^1 P''(rho_ref + tau theta)(1 - tau) dtau * theta^2` by 8-point
/// Gauss-Legendre quadrature.
pub fn pressure_remainder(theta: &[f64], params: &FluidParams) -> Result<Vec<f64>, NonlinearError> {
    let law = params.pressure();
    let rho_ref = params.rho_ref();
    theta
        .par_iter()
        .map(|&t| {
            let rho = rho_ref + t;
            if !law.is_valid_at(rho) {
                return Err(NonlinearError::ValidityExceeded { rho });
            }
            let mut acc = 0.0;
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                for tau in [0.5 * (1.0 - x), 0.5 * (1.0 + x)] {
                    acc += 0.5 * w * law.d2(rho_ref + tau * t) * (1.0 - tau);
                }
            }
            Ok(acc * t * t)
        })
        .collect()
}

/// The bracket `H` and the nonlinearity `g = -Div H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    pub bracket: TensorField,
    pub g: Vec<Vec<f64>>,
}

fn check_range(theta: &[f64], rho_ref: f64) -> Result<(), NonlinearError> {
    let (lo, hi) = theta
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(rho_ref + t), hi.max(rho_ref + t))
        });
    if !(lo >= 0.25 * rho_ref && hi <= 4.0 * rho_ref) {
        return Err(NonlinearError::RangeViolation { min: lo, max: hi });
    }
    Ok(())
}

/// Assembles `H(theta, m)` from real fields and their coefficients, with
/// 2/3-rule truncation after every pointwise product when `dealias` is set.
fn bracket_impl(
    engine: &SpectralEngine,
    theta: &[f64],
    theta_hat: &[Complex64],
    m: &[Vec<f64>],
    params: &FluidParams,
    dealias: bool,
) -> Result<TensorField, NonlinearError> {
    let grid = *engine.grid();
    let dim = grid.dim();
    let rho_ref = params.rho_ref();
    check_range(theta, rho_ref)?;
    let trunc = Truncation { engine, enabled: dealias };

    let inv_density = trunc.apply(theta.iter().map(|t| 1.0 / (rho_ref + t)).collect());
    let excess: Vec<f64> = inv_density.iter().map(|v| v - 1.0 / rho_ref).collect();
    let scaled_m: Vec<Vec<f64>> = m.iter().map(|c| trunc.product(&excess, c)).collect();
    let scaled_hats: Vec<Vec<Complex64>> = scaled_m.iter().map(|c| engine.forward_real(c)).collect();
    let viscous = viscous_from_hats(engine, &scaled_hats, params)?;
    let korteweg = korteweg_impl(engine, theta, theta_hat, params, &trunc)?;
    let pressure = trunc.apply(pressure_remainder(theta, params)?);

    let mut h = TensorField::zeros(&grid);
    for j in 0..dim {
        for k in j..dim {
            let mm = trunc.product(&m[j], &m[k]);
            let convective = trunc.product(&inv_density, &mm);
            let mut comp: Vec<f64> = (0..grid.len())
                .map(|i| convective[i] - viscous.get(j, k)[i] - korteweg.get(j, k)[i])
                .collect();
            if j == k {
                for (v, p) in comp.iter_mut().zip(&pressure) {
                    *v += p;
                }
            }
            h.get_mut(k, j).clone_from(&comp);
            *h.get_mut(j, k) = comp;
        }
    }
    Ok(h)
}

fn minus_divergence(engine: &SpectralEngine, h: &TensorField) -> Vec<Vec<Complex64>> {
    let hats: Vec<Vec<Complex64>> = h.comps.iter().map(|c| engine.forward_real(c)).collect();
    let mut g = engine.divergence_spectral(&hats);
    for comp in g.iter_mut() {
        for v in comp.iter_mut() {
            *v = -*v;
        }
    }
    g
}

/// `g(theta, m) = -Div H(theta, m)` on real fields, dealiased.
pub fn nonlinearity_g(
    engine: &SpectralEngine,
    theta: &[f64],
    m: &[Vec<f64>],
    params: &FluidParams,
) -> Result<Nonlinearity, NonlinearError> {
    let grid = *engine.grid();
    if theta.len() != grid.len() {
        return Err(NonlinearError::GridMismatch);
    }
    check_vector(&grid, m)?;
    let theta_hat = engine.forward_real(theta);
    let bracket = bracket_impl(engine, theta, &theta_hat, m, params, true)?;
    let mut g_hat = minus_divergence(engine, &bracket);
    for comp in g_hat.iter_mut() {
        engine.dealias(comp);
    }
    Ok(Nonlinearity {
        g: g_hat.iter().map(|c| engine.inverse_real(c)).collect(),
        bracket,
    })
}

/// Coefficients of `g` for a state given by its coefficients.
pub(crate) fn nonlinearity_spectral(
    engine: &SpectralEngine,
    state: &SpectralState,
    params: &FluidParams,
) -> Result<Vec<Vec<Complex64>>, NonlinearError> {
    let theta = engine.inverse_real(&state.theta);
    let m: Vec<Vec<f64>> = state.m.iter().map(|c| engine.inverse_real(c)).collect();
    let bracket = bracket_impl(engine, &theta, &state.theta, &m, params, true)?;
    let mut g_hat = minus_divergence(engine, &bracket);
    for comp in g_hat.iter_mut() {
        engine.dealias(comp);
    }
    Ok(g_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gaussian_bump, PressureLaw, MAX_DIM};
    use std::f64::consts::PI;

    fn setup(n: usize) -> (Grid, SpectralEngine, FluidParams) {
        let grid = Grid::new(2, n, 2.0 * PI).unwrap();
        let params = FluidParams::with_quadratic_pressure(0.7, 0.4, 0.3, 1.2, 1.5).unwrap();
        (grid, SpectralEngine::new(grid), params)
    }

    fn smooth(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut x = [0.0; MAX_DIM];
        (0..grid.len())
            .map(|i| {
                grid.position(i, &mut x);
                f(x[0], x[1])
            })
            .collect()
    }

    #[test]
    fn viscous_examples() {
        let (grid, e, p) = setup(32);
        let zero = vec![vec![0.0; grid.len()]; 2];
        let s = viscous_tensor(&e, &zero, &p).unwrap();
        assert!(s.comps.iter().flatten().all(|v| *v == 0.0));
        let shift = vec![vec![1.3; grid.len()], vec![-0.2; grid.len()]];
        let s = viscous_tensor(&e, &shift, &p).unwrap();
        assert!(s.comps.iter().flatten().all(|v| v.abs() < 1e-12));
        let shear = vec![smooth(&grid, |_, y| y.sin()), vec![0.0; grid.len()]];
        let s = viscous_tensor(&e, &shear, &p).unwrap();
        let expect = smooth(&grid, |_, y| p.mu() * y.cos());
        for i in 0..grid.len() {
            assert!((s.get(0, 1)[i] - expect[i]).abs() < 1e-12);
            assert!((s.get(1, 0)[i] - expect[i]).abs() < 1e-12);
            assert!(s.get(0, 0)[i].abs() < 1e-12 && s.get(1, 1)[i].abs() < 1e-12);
        }
    }

    #[test]
    fn korteweg_examples() {
        let (grid, e, p) = setup(32);
        let k = korteweg_tensor(&e, &vec![2.0; grid.len()], &p).unwrap();
        assert!(k.comps.iter().flatten().all(|v| v.abs() < 1e-12));
        let rho = smooth(&grid, |x, y| 1.0 + 0.3 * x.sin() * (2.0 * y).cos());
        let k = korteweg_tensor(&e, &rho, &p).unwrap();
        assert!(k.asymmetry() == 0.0);
        // independent trace: kappa N/2 (Lap rho^2 - |grad rho|^2) - kappa |grad rho|^2
        let rho_x = smooth(&grid, |x, y| 0.3 * x.cos() * (2.0 * y).cos());
        let rho_y = smooth(&grid, |x, y| -0.6 * x.sin() * (2.0 * y).sin());
        let sq: Vec<f64> = rho.iter().map(|r| r * r).collect();
        let lap = {
            let a = e.derivative(&sq, &[2, 0]).unwrap();
            let b = e.derivative(&sq, &[0, 2]).unwrap();
            a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>()
        };
        let tr = k.trace();
        for i in 0..grid.len() {
            let g2 = rho_x[i] * rho_x[i] + rho_y[i] * rho_y[i];
            let expect = p.kappa() * (lap[i] - g2) - p.kappa() * g2;
            assert!((tr[i] - expect).abs() < 1e-11, "{} vs {}", tr[i], expect);
        }
    }

    #[test]
    fn pressure_remainder_examples() {
        let (grid, _, p) = setup(16);
        let theta = smooth(&grid, |x, y| 0.4 * (x + y).sin());
        let r = pressure_remainder(&theta, &p).unwrap();
        for (v, t) in r.iter().zip(&theta) {
            assert!((v - 1.5 * t * t).abs() < 1e-14);
        }
        assert!(pressure_remainder(&vec![0.0; 4], &p).unwrap().iter().all(|v| *v == 0.0));

        let law = PressureLaw::polynomial(vec![0.3, 0.0, 0.8, -0.5, 0.2], 1.0);
        let params = FluidParams::new(1.0, 0.0, 1.0, 1.0, law.clone()).unwrap();
        let r = pressure_remainder(&theta, &params).unwrap();
        for (v, t) in r.iter().zip(&theta) {
            let taylor = law.evaluate(1.0 + t) - law.evaluate(1.0) - law.d1(1.0) * t;
            assert!((v - taylor).abs() < 1e-14);
        }

        let bounded = PressureLaw::custom(|r| (r - 1.0).powi(2), |r| 2.0 * (r - 1.0), |_| 2.0, 0.5, 2.0).unwrap();
        let params = FluidParams::new(1.0, 0.0, 1.0, 1.0, bounded).unwrap();
        assert!(matches!(
            pressure_remainder(&[1.5], &params),
            Err(NonlinearError::ValidityExceeded { .. })
        ));
    }

    #[test]
    fn nonlinearity_at_zero_density_perturbation() {
        let (grid, e, p) = setup(32);
        let zero = vec![0.0; grid.len()];
        let none = nonlinearity_g(&e, &zero, &[zero.clone(), zero.clone()], &p).unwrap();
        assert!(none.g.iter().flatten().all(|v| *v == 0.0));

        let m = vec![
            smooth(&grid, |x, y| 0.2 * x.sin() * y.cos()),
            smooth(&grid, |x, _| 0.1 * (2.0 * x).cos()),
        ];
        let out = nonlinearity_g(&e, &zero, &m, &p).unwrap();
        let mut expect = TensorField::zeros(&grid);
        for j in 0..2 {
            for k in 0..2 {
                *expect.get_mut(j, k) = e.dealias_real(
                    &m[j].iter().zip(&m[k]).map(|(a, b)| a * b / p.rho_ref()).collect::<Vec<_>>(),
                );
            }
        }
        let g_expect = e.divergence_form_momentum(&expect).unwrap();
        for d in 0..2 {
            for i in 0..grid.len() {
                assert!((out.g[d][i] + g_expect[d][i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn range_violation() {
        let (grid, e, p) = setup(16);
        let theta = gaussian_bump(&grid, &grid.center(), 1.0, 4.0 * p.rho_ref());
        let zero = vec![0.0; grid.len()];
        assert!(matches!(
            nonlinearity_g(&e, &theta, &[zero.clone(), zero], &p),
            Err(NonlinearError::RangeViolation { .. })
        ));
    }
}
