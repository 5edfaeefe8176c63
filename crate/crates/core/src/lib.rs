//! Pseudospectral simulation and decay verification for the compressible
//! Navier-Stokes-Korteweg system in momentum form at a critical pressure
//! state `P'(rho_ref) = 0`.

pub mod analysis;
pub mod io;
pub mod model;
pub mod nonlinear;
pub mod symbols;
pub mod spectral;
