//! Physical parameters, pressure laws, grid geometry and field containers.

mod grid;
mod init;
mod params;
mod pressure;
mod state;

pub use grid::{Grid, MAX_DIM};
pub use init::{gaussian_bump, random_smooth_tensor};
pub use params::{FluidParams, CRITICALITY_TOL};
pub use pressure::PressureLaw;
pub use state::{SpectralState, State, TensorField};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("constraint violated: {0}")]
    ConstraintViolation(&'static str),
    #[error("pressure law is not critical at rho_star: P'={d1:e}, P''={d2:e}")]
    CriticalityViolation { d1: f64, d2: f64 },
    #[error("pressure derivative of order {order} disagrees with finite differences at rho={rho}")]
    InconsistentPressure { rho: f64, order: u8 },
    #[error("field shapes do not match the grid")]
    GridMismatch,
    #[error("non-finite field entries")]
    NonFinite,
}
