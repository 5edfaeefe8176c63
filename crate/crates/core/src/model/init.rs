use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Grid, TensorField, MAX_DIM};

/// `amplitude * exp(-|x - center|^2 / (2 width^2))` with minimum-image distances.
pub fn gaussian_bump(grid: &Grid, center: &[f64], width: f64, amplitude: f64) -> Vec<f64> {
    let h = grid.spacing();
    if width < 2.0 * h || width > 0.25 * grid.box_len() {
        log::warn!(
            "gaussian width {width} is poorly resolved (h = {h}, L = {})",
            grid.box_len()
        );
    }
    let mut x = [0.0; MAX_DIM];
    let inv = 1.0 / (2.0 * width * width);
    (0..grid.len())
        .map(|flat| {
            grid.position(flat, &mut x);
            amplitude * (-grid.periodic_dist_sq(&x, center) * inv).exp()
        })
        .collect()
}

/// Smooth random tensor field: a Gaussian envelope times a random constant
/// tensor plus a few random plane-wave modulations, all drawn from a seeded
/// ChaCha8 stream so that identical seeds give identical fields.
pub fn random_smooth_tensor(
    grid: &Grid,
    center: &[f64],
    width: f64,
    amplitude: f64,
    seed: u64,
) -> TensorField {
    const WAVES: usize = 3;
    let dim = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let envelope = gaussian_bump(grid, center, width, amplitude);
    let mut x = [0.0; MAX_DIM];
    let mut out = TensorField::zeros(grid);
    for comp in out.comps.iter_mut() {
        let base: f64 = rng.random_range(-1.0..1.0);
        let waves: Vec<([f64; MAX_DIM], f64, f64)> = (0..WAVES)
            .map(|_| {
                let mut k = [0.0; MAX_DIM];
                for v in k.iter_mut().take(dim) {
                    *v = rng.random_range(-1.0..1.0) / width;
                }
                let amp = 0.5 * rng.random_range(-1.0..1.0);
                let phase = rng.random_range(0.0..2.0 * PI);
                (k, amp, phase)
            })
            .collect();
        for (flat, v) in comp.iter_mut().enumerate() {
            grid.position(flat, &mut x);
            let mut modulation = base;
            for (k, amp, phase) in &waves {
                let mut arg = *phase;
                for d in 0..dim {
                    let mut dx = (x[d] - center[d]).rem_euclid(grid.box_len());
                    if dx > 0.5 * grid.box_len() {
                        dx -= grid.box_len();
                    }
                    arg += k[d] * dx;
                }
                modulation += amp * arg.cos();
            }
            *v = envelope[flat] * modulation;
        }
    }
    out
}
