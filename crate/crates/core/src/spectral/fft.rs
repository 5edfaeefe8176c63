use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::model::Grid;

// Columns gathered per batch when transforming a strided axis.
const COLUMN_BATCH: usize = 32;

/// Separable N-dimensional complex FFT on a row-major `n^N` buffer.
///
/// Forward is unnormalized; inverse carries the `1/n^N` factor.
#[derive(Clone)]
pub struct FftNd {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("grid", &self.grid).finish()
    }
}

impl FftNd {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.grid.len(), "buffer does not match grid");
        let n = self.grid.n();
        let dim = self.grid.dim();
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = n * stride;
            if stride == 1 {
                // contiguous lines: hand rustfft whole chunks of lines
                let lines_per_task = (4096 / n).max(1);
                data.par_chunks_mut(n * lines_per_task).for_each(|chunk| {
                    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                    fft.process_with_scratch(chunk, &mut scratch);
                });
            } else {
                data.par_chunks_mut(block).for_each(|blk| {
                    let mut buf = vec![Complex64::default(); n * COLUMN_BATCH];
                    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                    let mut c0 = 0;
                    while c0 < stride {
                        let batch = COLUMN_BATCH.min(stride - c0);
                        for b in 0..batch {
                            for i in 0..n {
                                buf[b * n + i] = blk[i * stride + c0 + b];
                            }
                        }
                        fft.process_with_scratch(&mut buf[..batch * n], &mut scratch);
                        for b in 0..batch {
                            for i in 0..n {
                                blk[i * stride + c0 + b] = buf[b * n + i];
                            }
                        }
                        c0 += batch;
                    }
                });
            }
        }
    }
}
