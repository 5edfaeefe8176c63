use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::etd::Integrator;
use super::scenario::NonlinearScenario;
use super::NonlinearError;
use crate::analysis::{
    aggregate_n, derivative_hats, lp_norm_vector, multi_indices, AggregateExponents, Band,
    Component, NormKind, NormSeries, SeriesBundle, SeriesDescriptor,
};
use crate::model::{SpectralState, State, MAX_DIM};
use crate::spectral::SpectralEngine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Started,
    Warning,
    Rejected,
    Completed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEvent {
    pub step: usize,
    pub time: f64,
    pub kind: EventKind,
    pub detail: String,
}

/// Diagnostics recorded at each sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    pub step: usize,
    pub time: f64,
    /// Box integral of `theta`.
    pub mass: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub admissible: bool,
    /// The global weighted norm over `[0, time]`.
    pub aggregate: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: State,
    pub final_time: f64,
    pub steps_taken: usize,
    pub bundle: SeriesBundle,
    pub samples: Vec<RunSample>,
    pub events: Vec<RunEvent>,
    /// Largest relative change of the mean density over all steps.
    pub max_mean_drift: f64,
    /// Largest relative conjugate-symmetry defect over all steps.
    pub max_symmetry_defect: f64,
    /// Set when the run stopped early; everything above covers the time
    /// before the failure.
    pub failure: Option<NonlinearError>,
}

impl RunOutcome {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    pub fn aggregate_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.aggregate).collect()
    }
}

fn groups_norm(grid: &crate::model::Grid, groups: &[Vec<Vec<f64>>], q: f64) -> f64 {
    groups.iter().map(|g| lp_norm_vector(grid, g, q)).sum()
}

/// One real field group per multi-index `|alpha| <= k`, each holding
/// `d^alpha` of every component.
fn sobolev_groups(
    engine: &SpectralEngine,
    comps: &[&[Complex64]],
    k: u32,
) -> Result<Vec<Vec<Vec<f64>>>, NonlinearError> {
    let dim = engine.grid().dim();
    let mut out = Vec::new();
    for order in 0..=k {
        for alpha in multi_indices(dim, order) {
            let mut group = Vec::with_capacity(comps.len());
            for c in comps {
                group.push(engine.inverse_real(&engine.derivative_spectral(c, &alpha)?));
            }
            out.push(group);
        }
    }
    Ok(out)
}

/// Time derivative of the state from the equations.
fn time_derivative(
    engine: &SpectralEngine,
    state: &SpectralState,
    g: &[Vec<Complex64>],
    integ: &Integrator,
) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
    let p = integ.params();
    let dim = engine.grid().dim();
    let len = state.theta.len();
    let i = Complex64::i();
    let mut dtheta = vec![Complex64::default(); len];
    let mut dm = vec![vec![Complex64::default(); len]; dim];
    let mut xi = [0.0; MAX_DIM];
    for flat in 0..len {
        let k2 = engine.mode(flat, &mut xi);
        let mut xi_m = Complex64::default();
        for d in 0..dim {
            xi_m += state.m[d][flat] * xi[d];
        }
        dtheta[flat] = -i * xi_m;
        for d in 0..dim {
            dm[d][flat] = -p.alpha() * k2 * state.m[d][flat] - p.beta() * xi[d] * xi_m
                - i * p.capillarity() * k2 * xi[d] * state.theta[flat]
                + g[d][flat];
        }
    }
    (dtheta, dm)
}

fn descriptor(kind: NormKind, q: f64) -> SeriesDescriptor {
    SeriesDescriptor::new(Component::Pair, kind, q, Band::Full)
}

/// Samples every constituent of the global weighted norm into `bundle`.
fn record_norms(
    integ: &Integrator,
    state: &SpectralState,
    g: &[Vec<Complex64>],
    exps: &AggregateExponents,
    t: f64,
    bundle: &mut SeriesBundle,
) -> Result<(), NonlinearError> {
    let engine = integ.engine();
    let grid = *engine.grid();
    let mut all: Vec<&[Complex64]> = vec![&state.theta];
    all.extend(state.m.iter().map(|c| c.as_slice()));
    let mut push = |d: SeriesDescriptor, v: f64| -> Result<(), NonlinearError> {
        if bundle.get(&d).is_none() {
            bundle.insert(NormSeries::new(d));
        }
        bundle.get_mut(&d).expect("inserted").push(t, v)?;
        Ok(())
    };
    for j in 0..=1u32 {
        let fields: Vec<Vec<f64>> = derivative_hats(engine, &all, j)?
            .iter()
            .map(|h| engine.inverse_real(h))
            .collect();
        for q in [f64::INFINITY, exps.q1, exps.q2] {
            push(descriptor(NormKind::Derivative(j), q), lp_norm_vector(&grid, &fields, q))?;
        }
    }
    let m: Vec<&[Complex64]> = state.m.iter().map(|c| c.as_slice()).collect();
    let theta_groups = sobolev_groups(engine, &[&state.theta], 3)?;
    let m_groups = sobolev_groups(engine, &m, 2)?;
    let (dtheta, dm) = time_derivative(engine, state, g, integ);
    let dm_refs: Vec<&[Complex64]> = dm.iter().map(|c| c.as_slice()).collect();
    let rate_theta = sobolev_groups(engine, &[&dtheta], 1)?;
    let rate_m = sobolev_groups(engine, &dm_refs, 0)?;
    for q in [exps.q1, exps.q2] {
        push(
            descriptor(NormKind::Regularity, q),
            groups_norm(&grid, &theta_groups, q) + groups_norm(&grid, &m_groups, q),
        )?;
        push(
            descriptor(NormKind::Rate, q),
            groups_norm(&grid, &rate_theta, q) + groups_norm(&grid, &rate_m, q),
        )?;
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Integrates the scenario to its horizon, sampling the global norm.
///
/// Setup problems are returned as errors; a rejected step ends the run
/// with `failure` set and all results up to that time retained.
pub fn run(scenario: &NonlinearScenario) -> Result<RunOutcome, NonlinearError> {
    scenario.check()?;
    let grid = scenario.grid;
    let rho_ref = scenario.params.rho_ref();
    let engine = SpectralEngine::new(grid);
    let integ = Integrator::new(engine.clone(), scenario.params.clone(), scenario.dt, scenario.nonlinear)?;
    let mut state = scenario.initial_state(&engine)?;
    let steps = scenario.steps();
    let exps = scenario.exponents;

    let mut events = vec![RunEvent {
        step: 0,
        time: 0.0,
        kind: EventKind::Started,
        detail: format!("{steps} steps of {} on {}^{}", scenario.dt, grid.n(), grid.dim()),
    }];
    for w in scenario.scope_warnings() {
        log::warn!("{w}");
        events.push(RunEvent {
            step: 0,
            time: 0.0,
            kind: EventKind::Warning,
            detail: w,
        });
    }

    let mut theta_real = engine.inverse_real(&state.theta);
    let mean0 = mean(&theta_real);
    let mut bundle = SeriesBundle::new();
    let mut samples = Vec::new();
    let mut max_mean_drift: f64 = 0.0;
    let mut max_symmetry_defect = state.conjugate_symmetry_defect();
    let mut failure = None;
    let mut taken = 0;

    for step in 0..=steps {
        let t = step as f64 * scenario.dt;
        let g = integ.forcing(&state);
        let g = match g {
            Ok(g) => g,
            Err(e) => {
                failure = Some(NonlinearError::StepRejected {
                    time: t,
                    reason: e.to_string(),
                });
                break;
            }
        };
        if scenario.samples_at(step) {
            record_norms(&integ, &state, &g, &exps, t, &mut bundle)?;
            let (lo, hi) = theta_real
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(rho_ref + v), hi.max(rho_ref + v))
                });
            samples.push(RunSample {
                step,
                time: t,
                mass: mean(&theta_real) * grid.volume(),
                rho_min: lo,
                rho_max: hi,
                admissible: lo >= 0.25 * rho_ref && hi <= 4.0 * rho_ref,
                aggregate: aggregate_n(&bundle, grid.dim(), &exps, t)?,
            });
        }
        if step == steps {
            break;
        }
        let next = match integ.step_with(&state, Some(g)) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(NonlinearError::StepRejected {
                    time: t + scenario.dt,
                    reason: e.to_string(),
                });
                break;
            }
        };
        let next_theta = engine.inverse_real(&next.theta);
        let finite = next_theta.iter().all(|v| v.is_finite())
            && next.m.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite());
        let admissible = next_theta
            .iter()
            .all(|v| rho_ref + v >= 0.25 * rho_ref && rho_ref + v <= 4.0 * rho_ref);
        if !finite || !admissible {
            failure = Some(NonlinearError::StepRejected {
                time: t + scenario.dt,
                reason: "density left the admissible window".into(),
            });
            break;
        }
        state = next;
        theta_real = next_theta;
        taken = step + 1;
        if mean0 != 0.0 {
            max_mean_drift = max_mean_drift.max((mean(&theta_real) - mean0).abs() / mean0.abs());
        }
        max_symmetry_defect = max_symmetry_defect.max(state.conjugate_symmetry_defect());
    }

    let final_time = taken as f64 * scenario.dt;
    match &failure {
        Some(e) => events.push(RunEvent {
            step: taken,
            time: final_time,
            kind: EventKind::Rejected,
            detail: e.to_string(),
        }),
        None => events.push(RunEvent {
            step: taken,
            time: final_time,
            kind: EventKind::Completed,
            detail: String::new(),
        }),
    }
    Ok(RunOutcome {
        final_state: engine.to_real(&state)?,
        final_time,
        steps_taken: taken,
        bundle,
        samples,
        events,
        max_mean_drift,
        max_symmetry_defect,
        failure,
    })
}

/// Final coefficients after integrating `horizon` without norm sampling.
pub fn integrate(
    scenario: &NonlinearScenario,
    horizon: f64,
) -> Result<SpectralState, NonlinearError> {
    scenario.check()?;
    let engine = SpectralEngine::new(scenario.grid);
    let integ = Integrator::new(engine.clone(), scenario.params.clone(), scenario.dt, scenario.nonlinear)?;
    let mut state = scenario.initial_state(&engine)?;
    let steps = (horizon / scenario.dt).round() as usize;
    for step in 0..steps {
        state = integ.step(&state).map_err(|e| NonlinearError::StepRejected {
            time: (step + 1) as f64 * scenario.dt,
            reason: e.to_string(),
        })?;
    }
    Ok(state)
}

/// Relative size of the nonlinear contribution at one data amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub amplitude: f64,
    /// `||u_nonlinear - u_linear|| / ||u_linear||` at the probe horizon.
    pub nonlinear_share: f64,
    pub completed: bool,
}

fn l2(state: &SpectralState) -> f64 {
    std::iter::once(&state.theta)
        .chain(&state.m)
        .flatten()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Compares nonlinear and linear-only runs over `horizon` for each amplitude.
pub fn scaling_probe(
    scenario: &NonlinearScenario,
    amplitudes: &[f64],
    horizon: f64,
) -> Result<Vec<ProbePoint>, NonlinearError> {
    amplitudes
        .iter()
        .map(|&amplitude| {
            let base = NonlinearScenario {
                amplitude,
                ..scenario.clone()
            };
            let linear = integrate(
                &NonlinearScenario {
                    nonlinear: false,
                    ..base.clone()
                },
                horizon,
            )?;
            let nonlinear = integrate(
                &NonlinearScenario {
                    nonlinear: true,
                    ..base
                },
                horizon,
            );
            Ok(match nonlinear {
                Ok(state) => {
                    let mut diff = state;
                    let mut neg = linear.clone();
                    neg.scale(-1.0);
                    diff.add_assign(&neg);
                    let norm = l2(&linear);
                    ProbePoint {
                        amplitude,
                        nonlinear_share: if norm > 0.0 { l2(&diff) / norm } else { 0.0 },
                        completed: true,
                    }
                }
                Err(NonlinearError::StepRejected { .. }) => ProbePoint {
                    amplitude,
                    nonlinear_share: f64::INFINITY,
                    completed: false,
                },
                Err(e) => return Err(e),
            })
        })
        .collect()
}

/// Largest probed amplitude whose nonlinear share stays at or below `target`.
pub fn calibrate_amplitude(points: &[ProbePoint], target: f64) -> Option<f64> {
    points
        .iter()
        .filter(|p| p.completed && p.nonlinear_share <= target)
        .map(|p| p.amplitude)
        .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.max(a))))
}
