use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_decay, predicted_exponent, theorem_applies, DecayReport, FitWindow};
use super::norms::{derivative_fields, derivative_hats, lp_norm_vector, mass_radius, sobolev_norm_spectral};
use super::series::{Band, Component, NormKind, NormSeries, SeriesDescriptor};
use super::AnalysisError;
use crate::model::{FluidParams, Grid, SpectralState, MAX_DIM};
use crate::spectral::{Cutoff, SpectralEngine};
use crate::symbols::SymbolKernel;

/// Share of the L2 mass that must stay within a quarter box of the center.
pub const TRUST_FRACTION: f64 = 0.99;

/// Initial data families for linear decay experiments. All are centered in
/// the box and built directly from their Fourier profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum LinearData {
    /// `F^ = |xi|^{-N/2} (1 - exp(-|xi|^2 / kmin^2))` with density `F` (when
    /// `with_density`) and momentum `Div(F I)`.
    CriticalDivergence { kmin: f64, with_density: bool },
    /// Density zero and momentum `c F e_1`, with `c` chosen so the band-limited
    /// momentum carries the same L2 energy as the divergence-form momentum.
    CriticalGeneric { kmin: f64 },
    /// `f^ = |xi|^{-N/2}`, `g^ = i (xi/|xi|) |xi|^{-N/2}`: scale-free data
    /// whose gradient norms decay at the parabolic rate.
    CriticalHighFrequency,
    /// Unit-mass Gaussian of width `width` in the momentum direction `e_1`.
    MomentumGaussian { width: f64 },
}

/// How data is carried to time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Propagator {
    /// The full solution operator.
    Full,
    /// The transverse (divergence-free) block alone, a heat semigroup applied
    /// to every momentum component.
    TransverseBlock,
}

/// Quantity sampled along the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum Measure {
    /// `||grad^j U||_p` of the chosen component.
    Lebesgue { component: Component, p: f64, j: u32 },
    /// `||d^j theta||_{W^1_p} + ||d^j m||_{L_p}`.
    Energy { p: f64, j: u32 },
}

impl Measure {
    fn p(&self) -> f64 {
        match *self {
            Measure::Lebesgue { p, .. } | Measure::Energy { p, .. } => p,
        }
    }

    fn j(&self) -> u32 {
        match *self {
            Measure::Lebesgue { j, .. } | Measure::Energy { j, .. } => j,
        }
    }

    fn descriptor(&self, band: Band) -> SeriesDescriptor {
        match *self {
            Measure::Lebesgue { component, p, j } => {
                SeriesDescriptor::new(component, NormKind::Derivative(j), p, band)
            }
            Measure::Energy { p, j } => SeriesDescriptor::new(Component::Pair, NormKind::Energy(j), p, band),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearScenario {
    pub grid: Grid,
    pub params: FluidParams,
    pub cutoff: Cutoff,
    pub band: Band,
    pub data: LinearData,
    pub propagator: Propagator,
    pub amplitude: f64,
    /// Lebesgue exponent the data is measured in.
    pub data_q: f64,
    pub measure: Measure,
    pub window: FitWindow,
    pub samples: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRun {
    pub series: NormSeries,
    /// 99% L2 mass radius at each sample.
    pub radius: Vec<f64>,
    pub trusted_until: f64,
    pub report: DecayReport,
}

impl LinearScenario {
    pub fn predicted(&self) -> f64 {
        predicted_exponent(self.grid.dim(), self.measure.p(), self.data_q, self.measure.j())
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let (a, b) = (self.window.start.ln(), self.window.end.ln());
        let n = self.samples.max(2);
        (0..n)
            .map(|i| match i {
                0 => self.window.start,
                i if i == n - 1 => self.window.end,
                _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
            })
            .collect()
    }
}

fn centering_sign(grid: &Grid, flat: usize) -> f64 {
    let mut idx = [0usize; MAX_DIM];
    grid.unflatten(flat, &mut idx);
    // shift to x = L/2 on every axis multiplies mode j by (-1)^j
    if idx[..grid.dim()].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fourier coefficients of the initial data, before any band split.
pub fn initial_coefficients(engine: &SpectralEngine, data: LinearData, amplitude: f64) -> SpectralState {
    let grid = *engine.grid();
    let dim = grid.dim();
    let half_n = dim as f64 / 2.0;
    // coefficient scaling so the real-space field samples the continuum inverse transform
    let scale = amplitude * grid.len() as f64 / grid.volume();
    let modes: Vec<(Complex64, [Complex64; MAX_DIM])> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut xi = [0.0; MAX_DIM];
            let k2 = engine.mode(flat, &mut xi);
            let mut m = [Complex64::default(); MAX_DIM];
            let mut idx = [0usize; MAX_DIM];
            grid.unflatten(flat, &mut idx);
            // Nyquist modes carry no data, so every field is exactly real
            if idx[..dim].iter().any(|&i| grid.is_nyquist(i)) {
                return (Complex64::default(), m);
            }
            if k2 == 0.0 {
                if let LinearData::MomentumGaussian { .. } = data {
                    m[0] = Complex64::new(scale, 0.0);
                }
                return (Complex64::default(), m);
            }
            let k = k2.sqrt();
            let s = scale * centering_sign(&grid, flat);
            let i = Complex64::i();
            let theta = match data {
                LinearData::CriticalDivergence { kmin, with_density } => {
                    let prof = s * k.powf(-half_n) * (1.0 - (-k2 / (kmin * kmin)).exp());
                    for d in 0..dim {
                        m[d] = i * xi[d] * prof;
                    }
                    if with_density {
                        Complex64::new(prof, 0.0)
                    } else {
                        Complex64::default()
                    }
                }
                LinearData::CriticalGeneric { kmin } => {
                    m[0] = Complex64::new(s * k.powf(-half_n) * (1.0 - (-k2 / (kmin * kmin)).exp()), 0.0);
                    Complex64::default()
                }
                LinearData::CriticalHighFrequency => {
                    let prof = s * k.powf(-half_n);
                    for d in 0..dim {
                        m[d] = i * (xi[d] / k) * prof;
                    }
                    Complex64::new(prof, 0.0)
                }
                LinearData::MomentumGaussian { width } => {
                    m[0] = Complex64::new(s * (-0.5 * width * width * k2).exp(), 0.0);
                    Complex64::default()
                }
            };
            (theta, m)
        })
        .collect();
    SpectralState {
        grid,
        theta: modes.iter().map(|(t, _)| *t).collect(),
        m: (0..dim).map(|d| modes.iter().map(|(_, m)| m[d]).collect()).collect(),
    }
}

fn band_part(
    engine: &SpectralEngine,
    state: SpectralState,
    band: Band,
    cutoff: &Cutoff,
) -> Result<SpectralState, AnalysisError> {
    Ok(match band {
        Band::Full => state,
        Band::Low => engine.frequency_split(&state, cutoff)?.0,
        Band::High => engine.frequency_split(&state, cutoff)?.1,
    })
}

fn momentum_energy(state: &SpectralState) -> f64 {
    state.m.iter().flatten().map(|c| c.norm_sqr()).sum()
}

fn measure_value(engine: &SpectralEngine, measure: &Measure, state: &SpectralState) -> Result<f64, AnalysisError> {
    let grid = *engine.grid();
    let theta: &[Complex64] = &state.theta;
    let m: Vec<&[Complex64]> = state.m.iter().map(|c| c.as_slice()).collect();
    Ok(match *measure {
        Measure::Lebesgue { component, p, j } => {
            let mut hats: Vec<&[Complex64]> = Vec::new();
            if component != Component::Momentum {
                hats.push(theta);
            }
            if component != Component::Theta {
                hats.extend(&m);
            }
            lp_norm_vector(&grid, &derivative_fields(engine, &hats, j)?, p)
        }
        Measure::Energy { p, j } => {
            let dtheta = derivative_hats(engine, &[theta], j)?;
            let refs: Vec<&[Complex64]> = dtheta.iter().map(|h| h.as_slice()).collect();
            sobolev_norm_spectral(engine, &refs, 1, p)? + lp_norm_vector(&grid, &derivative_fields(engine, &m, j)?, p)
        }
    })
}

fn transverse_flow(engine: &SpectralEngine, data: &SpectralState, params: &FluidParams, t: f64) -> SpectralState {
    let kernel = SymbolKernel::new(params);
    let factors: Vec<f64> = (0..engine.grid().len())
        .into_par_iter()
        .map(|flat| {
            let mut xi = [0.0; MAX_DIM];
            kernel.blocks(engine.mode(flat, &mut xi), t).transverse
        })
        .collect();
    let mut out = data.clone();
    for comp in std::iter::once(&mut out.theta).chain(out.m.iter_mut()) {
        for (c, f) in comp.iter_mut().zip(&factors) {
            *c *= f;
        }
    }
    out
}

fn l2_weight(engine: &SpectralEngine, state: &SpectralState) -> Vec<f64> {
    let mut w = vec![0.0; engine.grid().len()];
    for comp in std::iter::once(&state.theta).chain(&state.m) {
        for (acc, v) in w.iter_mut().zip(engine.inverse_real(comp)) {
            *acc += v * v;
        }
    }
    w
}

/// Runs one linear decay experiment: band-limited data propagated by the
/// exact solution operator, sampled at geometric times and fitted.
pub fn run_linear(scenario: &LinearScenario) -> Result<LinearRun, AnalysisError> {
    if scenario.samples < 2 {
        return Err(AnalysisError::InvalidScenario("at least two samples are needed".into()));
    }
    let engine = SpectralEngine::new(scenario.grid);
    let data = band_part(
        &engine,
        initial_coefficients(&engine, scenario.data, scenario.amplitude),
        scenario.band,
        &scenario.cutoff,
    )?;
    run_from_coefficients(&engine, scenario, &data)
}

fn run_from_coefficients(
    engine: &SpectralEngine,
    scenario: &LinearScenario,
    data: &SpectralState,
) -> Result<LinearRun, AnalysisError> {
    let grid = scenario.grid;
    let center = grid.center();
    let trust_radius = grid.box_len() / 4.0;
    let mut series = NormSeries::new(scenario.measure.descriptor(scenario.band));
    let mut radius = Vec::new();
    let mut trusted_until = 0.0;
    let mut trusted = true;
    for t in scenario.sample_times() {
        let state = match scenario.propagator {
            Propagator::Full => engine.apply_semigroup(data, &scenario.params, t)?,
            Propagator::TransverseBlock => transverse_flow(engine, data, &scenario.params, t),
        };
        series.push(t, measure_value(engine, &scenario.measure, &state)?)?;
        let r = mass_radius(&grid, &l2_weight(engine, &state), &center, TRUST_FRACTION);
        radius.push(r);
        trusted &= r < trust_radius;
        if trusted {
            trusted_until = t;
        }
    }
    let gated = theorem_applies(scenario.band, scenario.measure.p(), scenario.data_q);
    let report = fit_decay(
        &series,
        scenario.window,
        scenario.predicted(),
        scenario.tolerance,
        gated,
        trusted_until,
    )?;
    Ok(LinearRun {
        series,
        radius,
        trusted_until,
        report,
    })
}

/// Paired low-band density decay for divergence-form and generic momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum AblationReport {
    Measured {
        divergence: DecayReport,
        generic: DecayReport,
        /// `generic - divergence` fitted exponent.
        gap: f64,
        divergence_series: NormSeries,
        generic_series: NormSeries,
    },
    /// Both data sets vanish, so there is nothing to fit.
    Degenerate,
}

/// Ablation of the divergence-form condition on the low band.
///
/// `scenario.data` must be [`LinearData::CriticalDivergence`]; the generic
/// partner reuses its radial profile in `e_1` with matched momentum energy.
pub fn divergence_form_ablation(scenario: &LinearScenario) -> Result<AblationReport, AnalysisError> {
    let LinearData::CriticalDivergence { kmin, .. } = scenario.data else {
        return Err(AnalysisError::InvalidScenario(
            "ablation needs divergence-form data".into(),
        ));
    };
    let engine = SpectralEngine::new(scenario.grid);
    let div_data = LinearData::CriticalDivergence {
        kmin,
        with_density: false,
    };
    let div = band_part(
        &engine,
        initial_coefficients(&engine, div_data, scenario.amplitude),
        scenario.band,
        &scenario.cutoff,
    )?;
    let mut gen = band_part(
        &engine,
        initial_coefficients(&engine, LinearData::CriticalGeneric { kmin }, scenario.amplitude),
        scenario.band,
        &scenario.cutoff,
    )?;
    let (e_div, e_gen) = (momentum_energy(&div), momentum_energy(&gen));
    if e_div == 0.0 || e_gen == 0.0 {
        return Ok(AblationReport::Degenerate);
    }
    gen.scale((e_div / e_gen).sqrt());

    let theta_measure = Measure::Lebesgue {
        component: Component::Theta,
        p: scenario.measure.p(),
        j: scenario.measure.j(),
    };
    let div_scenario = LinearScenario {
        data: div_data,
        measure: theta_measure,
        ..scenario.clone()
    };
    let div_run = run_from_coefficients(&engine, &div_scenario, &div)?;
    let gen_scenario = LinearScenario {
        data: LinearData::CriticalGeneric { kmin },
        ..div_scenario.clone()
    };
    let mut gen_run = run_from_coefficients(&engine, &gen_scenario, &gen)?;
    // The generic symbol loses one power of |xi| against the divergence form;
    // the decay estimate does not cover this case.
    gen_run.report.predicted_exponent = div_run.report.predicted_exponent + 0.5;
    gen_run.report.gated = false;
    let gap = gen_run.report.fitted_exponent - div_run.report.fitted_exponent;
    Ok(AblationReport::Measured {
        divergence: div_run.report,
        generic: gen_run.report,
        gap,
        divergence_series: div_run.series,
        generic_series: gen_run.series,
    })
}

/// Unit-mass Gaussian momentum carried by the transverse block: a pure heat
/// flow whose sup norm is `(4 pi alpha (t + w^2 / (2 alpha)))^{-N/2}`.
pub fn heat_anchor_scenario(
    grid: Grid,
    params: FluidParams,
    width: f64,
    window: FitWindow,
    samples: usize,
    tolerance: f64,
) -> LinearScenario {
    LinearScenario {
        grid,
        params,
        cutoff: Cutoff::default_for(&grid),
        band: Band::Full,
        data: LinearData::MomentumGaussian { width },
        propagator: Propagator::TransverseBlock,
        amplitude: 1.0,
        data_q: 1.0,
        measure: Measure::Lebesgue {
            component: Component::Momentum,
            p: f64::INFINITY,
            j: 0,
        },
        window,
        samples,
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fit::{FIT_WINDOW, TOL_EXP};

    fn params() -> FluidParams {
        FluidParams::with_quadratic_pressure(1.0, 0.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn data_is_real_and_divergence_form_where_stated() {
        let grid = Grid::new(2, 32, 20.0).unwrap();
        let e = SpectralEngine::new(grid);
        let g = initial_coefficients(&e, LinearData::MomentumGaussian { width: 1.5 }, 1.0);
        assert!(g.conjugate_symmetry_defect() < 1e-12 * g.max_abs());
        let c = initial_coefficients(
            &e,
            LinearData::CriticalDivergence {
                kmin: 0.3,
                with_density: true,
            },
            1.0,
        );
        assert!(c.conjugate_symmetry_defect() < 1e-12 * c.max_abs());
        let mut xi = [0.0; MAX_DIM];
        for flat in 0..grid.len() {
            let k2 = e.mode(flat, &mut xi);
            // g^ = i xi f^ componentwise
            for d in 0..2 {
                let expect = Complex64::i() * xi[d] * c.theta[flat];
                assert!((c.m[d][flat] - expect).norm() < 1e-12 * c.max_abs().max(1.0) || k2 == 0.0);
            }
        }
    }

    #[test]
    fn heat_anchor_matches_closed_form() {
        let grid = Grid::new(2, 64, 40.0).unwrap();
        let p = FluidParams::with_quadratic_pressure(0.5, 0.0, 1.0, 1.0, 1.0).unwrap();
        let s = heat_anchor_scenario(grid, p, 1.0, FitWindow { start: 1.0, end: 4.0 }, 4, 0.05);
        let run = run_linear(&s).unwrap();
        let alpha = 0.5;
        for (&t, &v) in run.series.times().iter().zip(run.series.values()) {
            let exact = 1.0 / (4.0 * std::f64::consts::PI * alpha * (t + 0.5 / alpha));
            assert!((v - exact).abs() < 1e-6 * exact, "{t}: {v} vs {exact}");
        }
    }

    #[test]
    fn zero_data_ablation_is_degenerate() {
        let grid = Grid::new(2, 32, 64.0).unwrap();
        let scenario = LinearScenario {
            grid,
            params: params(),
            cutoff: Cutoff::new(0.5).unwrap(),
            band: Band::Low,
            data: LinearData::CriticalDivergence {
                kmin: 0.1,
                with_density: false,
            },
            propagator: Propagator::Full,
            amplitude: 0.0,
            data_q: 2.0,
            measure: Measure::Lebesgue {
                component: Component::Theta,
                p: f64::INFINITY,
                j: 0,
            },
            window: FIT_WINDOW,
            samples: 4,
            tolerance: TOL_EXP,
        };
        assert_eq!(divergence_form_ablation(&scenario).unwrap(), AblationReport::Degenerate);
    }

    #[test]
    fn small_box_is_not_trusted() {
        let grid = Grid::new(2, 32, 8.0).unwrap();
        let s = heat_anchor_scenario(grid, params(), 0.5, FIT_WINDOW, 6, 0.05);
        assert!(matches!(run_linear(&s), Err(AnalysisError::WindowOutsideTrust { .. })));
    }
}
