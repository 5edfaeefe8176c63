use serde::{Deserialize, Serialize};

use super::series::{Band, NormSeries};
use super::AnalysisError;

/// Absolute tolerance on fitted decay exponents.
pub const TOL_EXP: f64 = 0.1;

/// Default fitting window in time.
pub const FIT_WINDOW: FitWindow = FitWindow {
    start: 5.0,
    end: 50.0,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
    pub fit_window: FitWindow,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub tolerance: f64,
    pub trust_window_ok: bool,
    /// Whether the decay estimate covers this `(p, q)`; reports outside
    /// that range are informational.
    pub gated: bool,
    pub verdict: Verdict,
}

impl DecayReport {
    pub fn deviation(&self) -> f64 {
        (self.fitted_exponent - self.predicted_exponent).abs()
    }
}

/// `-(N/2)(1/q - 1/p) - j/2`
pub fn predicted_exponent(dim: usize, p: f64, q: f64, j: u32) -> f64 {
    -(dim as f64 / 2.0) * (1.0 / q - 1.0 / p) - j as f64 / 2.0
}

/// Whether the large-time decay estimate is stated for `(p, q)` on `band`.
pub fn theorem_applies(band: Band, p: f64, q: f64) -> bool {
    if q.is_infinite() && p.is_infinite() {
        return false;
    }
    match band {
        Band::Low => q > 1.0 && q <= 2.0 && p >= 2.0,
        Band::High | Band::Full => q > 1.0 && q <= p,
    }
}

/// Least-squares slope and intercept of `y` against `x`, with RMS residual.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fits `log value = sigma log t + c` over the samples inside `window`.
///
/// `trusted_until` is the last time at which the periodic box still
/// represents the whole-space solution.
pub fn fit_decay(
    series: &NormSeries,
    window: FitWindow,
    predicted: f64,
    tolerance: f64,
    gated: bool,
    trusted_until: f64,
) -> Result<DecayReport, AnalysisError> {
    if window.start >= trusted_until {
        return Err(AnalysisError::WindowOutsideTrust {
            start: window.start,
            trusted_until,
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times().iter().zip(series.values()) {
        if t < window.start || t > window.end {
            continue;
        }
        if !(v > 0.0) || t <= 0.0 {
            return Err(AnalysisError::NonPositiveSeries {
                series: series.descriptor.label(),
                time: t,
            });
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(AnalysisError::InsufficientSamples(xs.len()));
    }
    let (slope, _, residual) = least_squares(&xs, &ys);
    let trust_window_ok = window.end <= trusted_until;
    let verdict = Verdict::from_bool((slope - predicted).abs() <= tolerance && trust_window_ok);
    Ok(DecayReport {
        fitted_exponent: slope,
        predicted_exponent: predicted,
        fit_window: window,
        residual,
        tolerance,
        trust_window_ok,
        gated,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::series::{Component, NormKind, SeriesDescriptor};
    use proptest::prelude::*;

    fn power_series(c: f64, sigma: f64) -> NormSeries {
        let times: Vec<f64> = (0..64).map(|i| 1.0 + i as f64).collect();
        let values = times.iter().map(|t: &f64| c * t.powf(sigma)).collect();
        NormSeries::from_samples(
            SeriesDescriptor::new(Component::Theta, NormKind::Derivative(0), 2.0, Band::Low),
            times,
            values,
        )
        .unwrap()
    }

    #[test]
    fn exact_power_law() {
        let r = fit_decay(&power_series(2.0, -1.5), FIT_WINDOW, -1.5, TOL_EXP, true, 100.0).unwrap();
        assert!((r.fitted_exponent + 1.5).abs() < 1e-9);
        assert!(r.verdict.passed());
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn predicted_examples() {
        assert!((predicted_exponent(3, f64::INFINITY, 2.0, 0) + 0.75).abs() < 1e-15);
        assert!((predicted_exponent(2, 2.0, 2.0, 1) + 0.5).abs() < 1e-15);
        assert!(theorem_applies(Band::Low, f64::INFINITY, 2.0));
        assert!(!theorem_applies(Band::Low, f64::INFINITY, 3.0));
        assert!(theorem_applies(Band::High, 3.0, 3.0));
        assert!(!theorem_applies(Band::High, f64::INFINITY, f64::INFINITY));
    }

    #[test]
    fn trust_handling() {
        let s = power_series(1.0, -1.0);
        assert!(matches!(
            fit_decay(&s, FIT_WINDOW, -1.0, TOL_EXP, true, 4.0),
            Err(AnalysisError::WindowOutsideTrust { .. })
        ));
        let r = fit_decay(&s, FIT_WINDOW, -1.0, TOL_EXP, true, 30.0).unwrap();
        assert!(!r.trust_window_ok);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn non_positive_rejected() {
        let s = power_series(0.0, -1.0);
        assert!(matches!(
            fit_decay(&s, FIT_WINDOW, -1.0, TOL_EXP, true, 100.0),
            Err(AnalysisError::NonPositiveSeries { .. })
        ));
    }

    proptest! {
        #[test]
        fn recovers_exponent_regardless_of_scale(c in 1e-8f64..1e8, sigma in -4.0f64..1.0) {
            let r = fit_decay(&power_series(c, sigma), FIT_WINDOW, sigma, TOL_EXP, true, 100.0).unwrap();
            prop_assert!((r.fitted_exponent - sigma).abs() < 1e-9);
        }
    }
}
