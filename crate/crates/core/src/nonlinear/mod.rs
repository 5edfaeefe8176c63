//! Exponential time integration of the nonlinear system with exact linear
//! propagation and a pseudospectral nonlinearity.

mod etd;
mod run;
mod scenario;
mod tensors;

pub use etd::{step, Integrator};
pub use run::{
    calibrate_amplitude, integrate, run, scaling_probe, EventKind, ProbePoint, RunEvent, RunOutcome,
    RunSample,
};
pub use scenario::{InitialData, NonlinearScenario};
pub use tensors::{korteweg_tensor, nonlinearity_g, pressure_remainder, viscous_tensor, Nonlinearity};

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::model::ModelError;
use crate::spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearError {
    #[error("density range [{min}, {max}] leaves [rho_star/4, 4 rho_star]")]
    RangeViolation { min: f64, max: f64 },
    #[error("density {rho} lies outside the pressure law's validity interval")]
    ValidityExceeded { rho: f64 },
    #[error("step to t = {time} rejected: {reason}")]
    StepRejected { time: f64, reason: String },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("field does not match the grid")]
    GridMismatch,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
