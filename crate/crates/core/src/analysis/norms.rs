use num_complex::Complex64;

use crate::model::{Grid, MAX_DIM};
use crate::spectral::{SpectralEngine, SpectralError};

// Fixed chunking keeps floating-point reductions reproducible.
const CHUNK: usize = 4096;

fn chunked_sum<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    let mut total = 0.0;
    let mut start = 0;
    while start < len {
        let end = (start + CHUNK).min(len);
        let mut partial = 0.0;
        for i in start..end {
            partial += f(i);
        }
        total += partial;
        start = end;
    }
    total
}

fn lq_from_magnitudes<F: Fn(usize) -> f64>(grid: &Grid, q: f64, mag: F) -> f64 {
    let len = grid.len();
    let max = (0..len).map(&mag).fold(0.0, f64::max);
    if q.is_infinite() || max == 0.0 {
        return max;
    }
    let sum = chunked_sum(len, |i| (mag(i) / max).powf(q));
    max * (sum * grid.cell_volume()).powf(1.0 / q)
}

/// `(sum |f|^q h^N)^(1/q)`; `q = inf` gives the grid maximum of `|f|`.
pub fn lp_norm(grid: &Grid, field: &[f64], q: f64) -> f64 {
    assert!(q >= 1.0, "Lq norm needs q >= 1");
    lq_from_magnitudes(grid, q, |i| field[i].abs())
}

/// Lq norm of a vector (or any multi-component) field with pointwise
/// Euclidean magnitude.
pub fn lp_norm_vector(grid: &Grid, comps: &[Vec<f64>], q: f64) -> f64 {
    assert!(q >= 1.0, "Lq norm needs q >= 1");
    if comps.is_empty() {
        return 0.0;
    }
    lq_from_magnitudes(grid, q, |i| {
        comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()
    })
}

/// All multi-indices in `dim` variables of total order `order`.
pub fn multi_indices(dim: usize, order: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(dim, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, order, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Every derivative of exact order `order` of a scalar field.
pub fn gradient_collection(
    engine: &SpectralEngine,
    field: &[f64],
    order: u32,
) -> Result<Vec<Vec<f64>>, SpectralError> {
    let hat = engine.forward_real(field);
    multi_indices(engine.grid().dim(), order)
        .iter()
        .map(|alpha| {
            engine
                .derivative_spectral(&hat, alpha)
                .map(|d| engine.inverse_real(&d))
        })
        .collect()
}

/// Coefficients of every order-`order` derivative of every given component.
pub fn derivative_hats(
    engine: &SpectralEngine,
    hats: &[&[Complex64]],
    order: u32,
) -> Result<Vec<Vec<Complex64>>, SpectralError> {
    let mut out = Vec::new();
    for alpha in multi_indices(engine.grid().dim(), order) {
        for hat in hats {
            out.push(engine.derivative_spectral(hat, &alpha)?);
        }
    }
    Ok(out)
}

/// Real fields of every order-`order` derivative of every given component.
pub fn derivative_fields(
    engine: &SpectralEngine,
    hats: &[&[Complex64]],
    order: u32,
) -> Result<Vec<Vec<f64>>, SpectralError> {
    Ok(derivative_hats(engine, hats, order)?
        .iter()
        .map(|h| engine.inverse_real(h))
        .collect())
}

/// `sum_{|alpha| <= k} ||d^alpha f||_q`
pub fn sobolev_norm(
    engine: &SpectralEngine,
    field: &[f64],
    k: u32,
    q: f64,
) -> Result<f64, SpectralError> {
    sobolev_norm_vector(engine, std::slice::from_ref(&field.to_vec()), k, q)
}

/// Sobolev norm of a multi-component field; each `d^alpha` of the whole
/// vector is measured with the pointwise Euclidean magnitude.
pub fn sobolev_norm_vector(
    engine: &SpectralEngine,
    comps: &[Vec<f64>],
    k: u32,
    q: f64,
) -> Result<f64, SpectralError> {
    let hats: Vec<_> = comps.iter().map(|c| engine.forward_real(c)).collect();
    let refs: Vec<&[Complex64]> = hats.iter().map(|h| h.as_slice()).collect();
    sobolev_norm_spectral(engine, &refs, k, q)
}

/// [`sobolev_norm_vector`] for a field given by its coefficients.
pub fn sobolev_norm_spectral(
    engine: &SpectralEngine,
    hats: &[&[Complex64]],
    k: u32,
    q: f64,
) -> Result<f64, SpectralError> {
    let grid = *engine.grid();
    let mut total = 0.0;
    for order in 0..=k {
        for alpha in multi_indices(grid.dim(), order) {
            let derived: Vec<Vec<f64>> = hats
                .iter()
                .map(|h| {
                    engine
                        .derivative_spectral(h, &alpha)
                        .map(|d| engine.inverse_real(&d))
                })
                .collect::<Result<_, _>>()?;
            total += lp_norm_vector(&grid, &derived, q);
        }
    }
    Ok(total)
}

/// Radius around `center` containing `fraction` of the total of `weight`.
pub fn mass_radius(grid: &Grid, weight: &[f64], center: &[f64], fraction: f64) -> f64 {
    let mut x = [0.0; MAX_DIM];
    let mut pairs: Vec<(f64, f64)> = weight
        .iter()
        .enumerate()
        .map(|(i, w)| {
            grid.position(i, &mut x);
            (grid.periodic_dist_sq(&x, center), w.abs())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (r2, w) in &pairs {
        acc += w;
        if acc >= fraction * total {
            return r2.sqrt();
        }
    }
    pairs.last().map(|p| p.0.sqrt()).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::gaussian_bump;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_l2() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let f = vec![-2.0; g.len()];
        assert!((lp_norm(&g, &f, 2.0) - 2.0 * 3.0).abs() < 1e-12);
        assert_eq!(lp_norm(&g, &f, f64::INFINITY), 2.0);
    }

    #[test]
    fn linf_of_bump_is_amplitude() {
        let g = Grid::new(3, 16, 16.0).unwrap();
        let f = gaussian_bump(&g, &g.center(), 2.0, 0.3);
        assert!((lp_norm(&g, &f, f64::INFINITY) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn parseval() {
        let g = Grid::new(2, 32, 5.0).unwrap();
        let e = SpectralEngine::new(g);
        let f: Vec<f64> = (0..g.len()).map(|i| ((i * 7 % 13) as f64 - 6.0) * 0.1).collect();
        let hat = e.forward_real(&f);
        let spectral: f64 = hat.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.cell_volume() / g.len() as f64;
        let l2 = lp_norm(&g, &f, 2.0);
        assert!((l2 * l2 - spectral).abs() < 1e-12 * spectral);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(3, 0).len(), 1);
        assert_eq!(multi_indices(3, 1).len(), 3);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(3, 3).len(), 10);
        assert!(multi_indices(2, 3).iter().all(|a| a.iter().sum::<u32>() == 3));
    }

    #[test]
    fn sobolev_examples() {
        let g = Grid::new(2, 32, 4.0).unwrap();
        let e = SpectralEngine::new(g);
        let c = vec![1.5; g.len()];
        let base = lp_norm(&g, &c, 3.0);
        for k in 0..=3 {
            assert!((sobolev_norm(&e, &c, k, 3.0).unwrap() - base).abs() < 1e-12);
        }
        let mut x = [0.0; MAX_DIM];
        let kx = 2.0 * PI / g.box_len();
        let wave: Vec<f64> = (0..g.len())
            .map(|i| {
                g.position(i, &mut x);
                (kx * x[0]).sin()
            })
            .collect();
        let d1 = e.derivative(&wave, &[1, 0]).unwrap();
        let ratio = lp_norm(&g, &d1, 2.0) / lp_norm(&g, &wave, 2.0);
        assert!((ratio - kx).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn holder_on_finite_box(vals in proptest::collection::vec(-3.0f64..3.0, 64), q1 in 1.0f64..4.0, dq in 0.0f64..6.0) {
            let g = Grid::new(2, 8, 2.5).unwrap();
            let q2 = q1 + dq;
            let lhs = lp_norm(&g, &vals, q1);
            let rhs = g.volume().powf(1.0 / q1 - 1.0 / q2) * lp_norm(&g, &vals, q2);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
            let rhs_inf = g.volume().powf(1.0 / q1) * lp_norm(&g, &vals, f64::INFINITY);
            prop_assert!(lhs <= rhs_inf * (1.0 + 1e-12) + 1e-300);
        }
    }
}
