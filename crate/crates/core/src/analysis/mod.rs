//! Norms, weighted time norms, decay-exponent fitting and linear decay
//! experiments.

mod fit;
mod linear;
mod norms;
mod series;

pub use fit::{
    fit_decay, least_squares, predicted_exponent, theorem_applies, DecayReport, FitWindow, Verdict,
    FIT_WINDOW, TOL_EXP,
};
pub use linear::{
    initial_coefficients,
    divergence_form_ablation, heat_anchor_scenario, run_linear, AblationReport, LinearData,
    LinearRun, LinearScenario, Measure, Propagator, TRUST_FRACTION,
};
pub use norms::{
    derivative_fields, derivative_hats, gradient_collection, lp_norm, lp_norm_vector, mass_radius,
    multi_indices, sobolev_norm, sobolev_norm_spectral, sobolev_norm_vector,
};
pub use series::{
    aggregate_n, format_exponent, weighted_sup, weighted_time_norm, AggregateExponents, Band,
    Component, NormKind, NormSeries, SeriesBundle, SeriesDescriptor,
};

use thiserror::Error;

use crate::spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("series {series} has no samples covering [{start}, {end}]")]
    WindowUncovered { series: String, start: f64, end: f64 },
    #[error("aggregate norm is missing constituent series: {}", .0.join(", "))]
    MissingConstituent(Vec<String>),
    #[error("series {series} is not positive at t = {time}")]
    NonPositiveSeries { series: String, time: f64 },
    #[error("fit window starts at {start} but the box is trusted only until t = {trusted_until}")]
    WindowOutsideTrust { start: f64, trusted_until: f64 },
    #[error("fit window holds {0} samples; at least 2 are needed")]
    InsufficientSamples(usize),
    #[error("invalid sample: {0}")]
    InvalidSample(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
