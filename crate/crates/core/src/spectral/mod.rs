//! Transforms, exact linear propagation, frequency splitting and spectral
//! derivatives on a periodic grid.

mod cutoff;
mod engine;
mod fft;

pub use cutoff::Cutoff;
pub use engine::SpectralEngine;
pub use fft::FftNd;

use thiserror::Error;

/// Highest derivative order handled by [`SpectralEngine::derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("field does not match the engine grid")]
    GridMismatch,
    #[error("no nonzero mode lies in the low band |xi| <= 2 eps (eps = {eps}, fundamental = {fundamental})")]
    EmptyLowBand { eps: f64, fundamental: f64 },
    #[error("cutoff radius must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("derivative order {0} exceeds the supported maximum of 3")]
    DerivativeOrder(u32),
}
