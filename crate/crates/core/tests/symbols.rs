use nsk_core::model::FluidParams;
use nsk_core::symbols::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn thousand_random_cases_per_regime_match_the_matrix_exponential() {
    for dim in [2, 3] {
        for check in verify_symbols(1000, dim, 11 + dim as u64) {
            assert_eq!(check.cases, 1000);
            assert!(check.max_deviation <= 1e-10, "dim {dim}: {check:?}");
        }
    }
}

#[test]
fn adaptive_ode_reference_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for regime in [Regime::PositiveReal, Regime::NegativeOscillatory, Regime::Degenerate] {
        for _ in 0..10 {
            let c = random_case(&mut rng, regime, 3);
            let closed = solution_symbol(&c.params, &c.xi, c.t);
            let ode = ode_oracle(&c.params, &c.xi, c.t, 1e-12);
            assert!(closed.relative_deviation(&ode) < 1e-8, "{regime:?}");
        }
    }
}

#[test]
fn symbols_are_continuous_through_the_degenerate_point() {
    for xi in [[0.8, -0.3, 0.5], [3.0, 1.0, -2.0], [0.05, 0.01, 0.0]] {
        for t in [0.1, 1.5, 20.0] {
            let sweep = degeneracy_sweep(1.0, 1.0, 1.0, &xi, t).unwrap();
            assert!(sweep.branch_jump <= 1e-6, "{xi:?} {t}: {}", sweep.branch_jump);
            // neighbouring fractions differ by a factor of 10^(1/4), so steps shrink with them
            assert!(sweep.max_step < 1e-2, "{xi:?} {t}: {}", sweep.max_step);
        }
    }
}

#[test]
fn identity_at_time_zero_and_transverse_heat_block() {
    let p = FluidParams::with_quadratic_pressure(1.0, 0.5, 2.0, 1.0, 1.0).unwrap();
    let xi = [0.3, 0.4];
    let id = solution_symbol(&p, &xi, 0.0);
    for r in 0..3 {
        for c in 0..3 {
            let want = if r == c { 1.0 } else { 0.0 };
            assert!((id.0[(r, c)].re - want).abs() < 1e-15);
        }
    }
    // a divergence-free momentum (perpendicular to xi) only feels exp(-alpha |xi|^2 t)
    let m = solution_symbol(&p, &xi, 2.0);
    let perp = [-0.4, 0.3];
    let heat = (-p.alpha() * 0.25 * 2.0).exp();
    for r in 0..2 {
        let v: f64 = (0..2).map(|c| m.0[(1 + r, 1 + c)].re * perp[c]).sum();
        assert!((v - heat * perp[r]).abs() < 1e-14);
    }
}

fn regime_strategy() -> impl Strategy<Value = Regime> {
    prop_oneof![
        Just(Regime::PositiveReal),
        Just(Regime::NegativeOscillatory),
        Just(Regime::Degenerate)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn semigroup_property(seed in any::<u64>(), regime in regime_strategy(), split in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_case(&mut rng, regime, 3);
        let (s, t) = (split * c.t, (1.0 - split) * c.t);
        let whole = solution_symbol(&c.params, &c.xi, c.t);
        let composed = solution_symbol(&c.params, &c.xi, s).mul(&solution_symbol(&c.params, &c.xi, t));
        prop_assert!(composed.relative_deviation(&whole) < 1e-10);
    }

    #[test]
    fn symbol_is_rotation_covariant_in_the_plane(seed in any::<u64>(), angle in 0.0f64..6.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_case(&mut rng, Regime::NegativeOscillatory, 2);
        let (sn, cs) = angle.sin_cos();
        let rotated = [cs * c.xi[0] - sn * c.xi[1], sn * c.xi[0] + cs * c.xi[1]];
        let a = solution_symbol(&c.params, &c.xi, c.t);
        let b = solution_symbol(&c.params, &rotated, c.t);
        // the density-density entry depends on |xi| only
        prop_assert!((a.0[(0, 0)] - b.0[(0, 0)]).norm() <= 1e-12 * a.frobenius().max(1e-300));
    }
}
