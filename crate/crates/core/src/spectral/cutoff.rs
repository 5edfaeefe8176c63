use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::model::Grid;

/// Radial cutoff equal to 1 on `|xi| <= eps`, 0 on `|xi| >= 2 eps`, joined by
/// a quintic smoothstep in `r = (|xi| - eps) / eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub eps: f64,
}

impl Cutoff {
    pub const PROFILE: &'static str = "quintic-smoothstep";

    pub fn new(eps: f64) -> Result<Self, SpectralError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(SpectralError::InvalidCutoff(eps));
        }
        Ok(Self { eps })
    }

    /// A quarter of the largest per-axis resolved wavenumber.
    pub fn default_for(grid: &Grid) -> Self {
        Self {
            eps: 0.25 * grid.max_wavenumber(),
        }
    }

    pub fn phi(&self, xi_abs: f64) -> f64 {
        if xi_abs <= self.eps {
            return 1.0;
        }
        if xi_abs >= 2.0 * self.eps {
            return 0.0;
        }
        let r = (xi_abs - self.eps) / self.eps;
        1.0 - r * r * r * (10.0 - 15.0 * r + 6.0 * r * r)
    }
}
