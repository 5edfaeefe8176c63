use nalgebra::DMatrix;
use num_complex::Complex64;

// Pade(13) numerator coefficients b_0..b_13.
const B: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the unscaled Pade(13) approximant is accurate to
// double precision.
const THETA_13: f64 = 5.371_920_351_148_152;

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Pade approximant.
///
/// # Panics
/// Panics if `a` is not square.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * Complex64::new(0.5f64.powi(squarings), 0.0);

    let id = DMatrix::<Complex64>::identity(n, n);
    let c = |v: f64| Complex64::new(v, 0.0);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * (&a6 * c(B[13]) + &a4 * c(B[11]) + &a2 * c(B[9]));
    let u = &a * (inner_u + &a6 * c(B[7]) + &a4 * c(B[5]) + &a2 * c(B[3]) + &id * c(B[1]));
    let inner_v = &a6 * (&a6 * c(B[12]) + &a4 * c(B[10]) + &a2 * c(B[8]));
    let v = inner_v + &a6 * c(B[6]) + &a4 * c(B[4]) + &a2 * c(B[2]) + &id * c(B[0]);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, data: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(rows, rows, &data.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_matrix() {
        let a = real(3, &[1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, -40.0]);
        let e = expm(&a);
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-2f64).exp()).abs() < 1e-15);
        assert!((e[(2, 2)].re - (-40f64).exp()).abs() < 1e-28);
    }

    #[test]
    fn nilpotent_jordan_block() {
        let a = real(2, &[-3.0, 1.0, 0.0, -3.0]);
        let t = 2.0;
        let e = expm(&(a * Complex64::new(t, 0.0)));
        let decay = (-3.0 * t).exp();
        assert!((e[(0, 1)].re - t * decay).abs() < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        let w = 7.3;
        let a = real(2, &[0.0, -w, w, 0.0]);
        let e = expm(&a);
        assert!((e[(0, 0)].re - w.cos()).abs() < 1e-13);
        assert!((e[(1, 0)].re - w.sin()).abs() < 1e-13);
    }

    #[test]
    fn agrees_with_nalgebra() {
        let a = real(3, &[0.3, -1.2, 4.0, 2.0, -5.0, 0.1, -0.7, 3.3, -9.0]);
        let ours = expm(&a);
        let theirs = a.clone().exp();
        let err = (&ours - &theirs).norm() / theirs.norm();
        assert!(err < 1e-13, "{err}");
    }
}
