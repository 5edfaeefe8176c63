use nsk_core::analysis::{aggregate_n, AggregateExponents};
use nsk_core::model::{gaussian_bump, random_smooth_tensor, FluidParams, Grid};
use nsk_core::nonlinear::*;
use nsk_core::spectral::SpectralEngine;

fn params() -> FluidParams {
    FluidParams::with_quadratic_pressure(1.0, 0.5, 1.0, 1.0, 1.0).unwrap()
}

fn scenario(amplitude: f64, horizon: f64, dt: f64) -> NonlinearScenario {
    NonlinearScenario {
        params: params(),
        grid: Grid::new(2, 32, 20.0).unwrap(),
        initial: InitialData {
            bump_width: 2.0,
            tensor_width: 2.0,
            seed: 42,
        },
        amplitude,
        horizon,
        dt,
        exponents: AggregateExponents::DEFAULT_3D,
        sample_every: 5,
        dense_until: 0.0,
        nonlinear: true,
    }
}

fn g_size(engine: &SpectralEngine, amp: f64) -> f64 {
    let grid = *engine.grid();
    let c = grid.center();
    let theta = gaussian_bump(&grid, &c, 2.0, amp);
    let tensor = random_smooth_tensor(&grid, &c, 2.0, amp, 9);
    let m = engine.divergence_form_momentum(&tensor).unwrap();
    let nl = nonlinearity_g(engine, &theta, &m, &params()).unwrap();
    nl.g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn nonlinearity_is_quadratic_for_small_data() {
    let engine = SpectralEngine::new(Grid::new(2, 32, 20.0).unwrap());
    assert_eq!(g_size(&engine, 0.0), 0.0);
    let ratio = g_size(&engine, 2e-4) / g_size(&engine, 1e-4);
    assert!((ratio - 4.0).abs() < 1e-2, "{ratio}");
}

#[test]
fn vanishing_density_perturbation_is_allowed() {
    let grid = Grid::new(2, 16, 10.0).unwrap();
    let engine = SpectralEngine::new(grid);
    let m = vec![gaussian_bump(&grid, &grid.center(), 1.5, 0.1), vec![0.0; grid.len()]];
    let nl = nonlinearity_g(&engine, &vec![0.0; grid.len()], &m, &params()).unwrap();
    assert!(nl.g.iter().flatten().all(|v| v.is_finite()));
    assert!(nl.g[0].iter().any(|v| *v != 0.0));
    assert!(nl.bracket.asymmetry() < 1e-14);
}

#[test]
fn mean_density_and_realness_are_conserved() {
    let out = run(&scenario(0.1, 2.0, 0.05)).unwrap();
    assert!(out.succeeded());
    assert_eq!(out.steps_taken, 40);
    assert!(out.max_mean_drift <= 1e-12, "{}", out.max_mean_drift);
    assert!(out.max_symmetry_defect <= 1e-13);
    let mass0 = out.samples[0].mass;
    assert!(out.samples.iter().all(|s| (s.mass - mass0).abs() <= 1e-12 * mass0.abs()));
}

#[test]
fn linear_only_run_is_exact_propagation() {
    let mut s = scenario(0.1, 1.0, 0.1);
    s.nonlinear = false;
    let engine = SpectralEngine::new(s.grid);
    let stepped = integrate(&s, 1.0).unwrap();
    let exact = engine
        .apply_semigroup(&s.initial_state(&engine).unwrap(), &s.params, 1.0)
        .unwrap();
    assert!(stepped.relative_max_diff(&exact) < 1e-12);
}

#[test]
fn runs_are_bitwise_repeatable() {
    let a = run(&scenario(0.1, 1.0, 0.05)).unwrap();
    let b = run(&scenario(0.1, 1.0, 0.05)).unwrap();
    assert_eq!(a.bundle, b.bundle);
    assert_eq!(a.samples, b.samples);
    assert_eq!(a.final_state, b.final_state);
}

#[test]
fn global_norm_is_monotone_and_sampling_converges() {
    let mut s = scenario(0.1, 20.0, 0.05);
    s.sample_every = 1;
    let out = run(&s).unwrap();
    let agg = out.aggregate_values();
    assert!(agg.windows(2).all(|w| w[1] >= w[0]));
    let full = aggregate_n(&out.bundle, 2, &s.exponents, out.final_time).unwrap();
    let half = aggregate_n(&out.bundle.thinned(2), 2, &s.exponents, out.final_time).unwrap();
    assert!((full - half).abs() <= 0.01 * full, "{full} {half}");
    assert_eq!(full, *agg.last().unwrap());
}

#[test]
fn large_data_is_rejected_with_partial_results() {
    let out = run(&scenario(5.0, 1.0, 0.1)).unwrap();
    assert!(!out.succeeded());
    assert!(matches!(out.failure, Some(NonlinearError::StepRejected { .. })));
    assert!(out.events.iter().any(|e| e.kind == EventKind::Rejected));
}

#[test]
fn two_dimensional_runs_warn_about_scope() {
    let out = run(&scenario(0.05, 0.2, 0.1)).unwrap();
    assert!(out
        .events
        .iter()
        .any(|e| e.kind == EventKind::Warning && e.detail.contains("3 <= N <= 7")));
}

#[test]
fn probe_share_grows_with_amplitude() {
    let s = scenario(0.1, 1.0, 0.1);
    let points = scaling_probe(&s, &[0.01, 0.02, 0.04], 1.0).unwrap();
    assert!(points.iter().all(|p| p.completed));
    assert!(points.windows(2).all(|w| w[1].nonlinear_share > w[0].nonlinear_share));
    // the nonlinear share of a quadratic term is linear in the amplitude
    let r = points[1].nonlinear_share / points[0].nonlinear_share;
    assert!((r - 2.0).abs() < 0.1, "{r}");
    assert_eq!(calibrate_amplitude(&points, points[1].nonlinear_share), Some(0.02));
    assert_eq!(calibrate_amplitude(&points, 0.0), None);
}

#[test]
fn real_space_step_matches_spectral_integrator() {
    let s = scenario(0.1, 0.1, 0.1);
    let engine = SpectralEngine::new(s.grid);
    let hat = s.initial_state(&engine).unwrap();
    let real = engine.to_real(&hat).unwrap();
    let next = step(&real, &s.params, 0.1).unwrap();
    let via = engine.to_real(&Integrator::new(engine.clone(), s.params.clone(), 0.1, true).unwrap().step(&hat).unwrap()).unwrap();
    let diff = next.theta.iter().zip(&via.theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-14, "{diff}");
}
