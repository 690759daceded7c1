mod common;

use common::*;
use predprey_core::bifurcation::{find_hopf, find_saddle_node, Criticality};
use predprey_core::dynamics::integrate;
use predprey_core::manifolds::{homoclinic_bracket, ScanConfig};
use predprey_core::model::fear_factor;
use predprey_core::presets::{fig2_params, fig3a_params, fig3b_params, harvest_params, prey_free_decay_error};
use predprey_core::{IntegratorConfig, ModelParams, Param, State};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params_strategy(harvest: bool) -> impl Strategy<Value = ModelParams> {
    any::<u64>().prop_map(move |seed| random_params(&mut ChaCha8Rng::seed_from_u64(seed), harvest))
}

fn family_strategy() -> impl Strategy<Value = ModelParams> {
    any::<u64>().prop_map(|seed| random_family_member(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn short() -> IntegratorConfig {
    IntegratorConfig::default().with_t_end(30.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectories_stay_nonnegative(params in params_strategy(true), u in 0.0..10.0f64, v in 0.0..10.0f64) {
        check_nonnegative(&params, State::new(u, v), &short()).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn prey_bounded_by_carrying_capacity(params in params_strategy(false), over in 1.01..3.0f64, v in 0.01..5.0f64) {
        let params = params.with(Param::K, 0.0);
        let s0 = State::new(over * params.carrying_capacity(), v);
        check_dissipative(&params, s0, &IntegratorConfig::default().with_t_end(200.0))
            .map_err(TestCaseError::fail)?;
    }

    #[test]
    fn jacobian_matches_central_differences(params in params_strategy(true), u in 0.2..8.0f64, v in 0.2..8.0f64) {
        check_jacobian_fd(&params, State::new(u, v)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn coexistence_identities(params in params_strategy(false)) {
        check_coexistence_identities(&params).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn closed_form_agrees_with_newton(params in params_strategy(false)) {
        check_newton_agreement(&params).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn family_equilibrium_counts(params in family_strategy()) {
        check_equilibrium_count(&params).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn fear_factor_decreasing(k1 in 0.0..5.0f64, dk in 0.01..5.0f64, v in 0.01..10.0f64, dv in 0.01..10.0f64) {
        prop_assert!(fear_factor(k1 + dk, v) < fear_factor(k1, v));
        if k1 > 0.0 {
            prop_assert!(fear_factor(k1, v + dv) < fear_factor(k1, v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hopf_points_pass_checks(scale in 0.95..1.05f64, which in 0..2usize) {
        let (params, interval) = if which == 0 {
            (fig3a_params(0.0), (0.0, 50.0))
        } else {
            (fig3b_params(0.0), (0.0, 1.0))
        };
        let params = params.with(Param::A, params.a * scale);
        check_hopf_points(&params, Param::K, interval).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn criticality_matches_sign_of_l(scale in 0.9..1.1f64) {
        let params = fig3a_params(0.0).with(Param::E, 2.5 * scale);
        for h in find_hopf(&params, Param::K, (0.0, 50.0)).unwrap().points {
            let l = h.l1().unwrap();
            prop_assert_eq!(h.criticality(), Some(if l > 0.0 { Criticality::Sub } else { Criticality::Super }));
        }
    }

    #[test]
    fn tolerance_halving_converges(params in params_strategy(false), u in 0.5..6.0f64, v in 0.5..6.0f64) {
        check_tolerance_halving(&params, State::new(u, v), 1e-8, 10.0).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn extinction_time_refines(k in 0.03..0.1f64) {
        check_extinction_refinement(&fig2_params(k), State::new(4.8, 8.3), 1e-8)
            .map_err(TestCaseError::fail)?;
    }

    #[test]
    fn prey_free_decay_is_exponential(k in 0.03..0.2f64, v in 6.0..12.0f64) {
        let params = fig2_params(k);
        let tr = integrate(&params, State::new(4.8, v), &IntegratorConfig::default().with_t_end(20.0)).unwrap();
        if let Some(err) = prey_free_decay_error(&tr, params.d, 1e-6) {
            prop_assert!(err <= 1e-6, "relative deviation {err:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn separatrix_points_are_two_sided(k in 0.0..0.04f64) {
        let scan = ScanConfig { lines: 12, v_max: Some(24.0), ..ScanConfig::default() };
        check_two_sided(&fig2_params(k), &scan, &IntegratorConfig::default()).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn lyapunov_coefficient_is_continuous() {
    let l_at = |a: f64| {
        let params = fig3a_params(0.0).with(Param::A, a);
        find_hopf(&params, Param::K, (10.0, 20.0)).unwrap().points[0].l1().unwrap()
    };
    let l0 = l_at(2.5);
    let mut last = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let jump = (l_at(2.5 + eps) - l0).abs();
        assert!(jump < last && jump < 50.0 * eps, "jump {jump} at eps {eps}");
        last = jump;
    }
}

#[test]
fn harvest_coefficient_c22_bounded() {
    let params = harvest_params(0.0).with(Param::R, 0.6);
    for h in find_hopf(&params, Param::Q, (0.0, 0.5)).unwrap().points {
        let v = h.equilibrium.v;
        let c22 = h.diagnostics["c22"];
        let c22_0 = -params.d * (1.0 - params.m);
        assert!((c22 - c22_0).abs() <= h.value * (params.r - params.m).abs() * v.powf(params.r - 1.0) + 1e-12);
    }
}

#[test]
fn fold_separates_saddle_from_stable() {
    for (param, interval) in [(Param::K, (0.0, 0.1)), (Param::B, (0.2, 0.5)), (Param::D, (1.0, 2.5))] {
        let base = fig2_params(if param == Param::K { 0.0 } else { 0.01 });
        let sn = find_saddle_node(&base, param, interval).unwrap().points.remove(0);
        assert!(sn.diagnostics["det_below_lower"] * sn.diagnostics["det_below_upper"] < 0.0);
        assert!(sn.trace < 0.0);
    }
}

#[test]
fn homoclinic_brackets_nest() {
    let cfg = IntegratorConfig::default();
    let params = harvest_params(0.0);
    let coarse = homoclinic_bracket(&params, Param::Q, 0.3, 0.35, 3, &cfg).unwrap();
    let fine = homoclinic_bracket(&params, Param::Q, 0.3, 0.35, 6, &cfg).unwrap();
    assert!(0.3 <= coarse.lo && coarse.hi <= 0.35);
    assert!(coarse.lo <= fine.lo && fine.hi <= coarse.hi);
    assert!(((coarse.hi - coarse.lo) - 0.05 / 8.0).abs() < 1e-12);
    assert!(((fine.hi - fine.lo) - 0.05 / 64.0).abs() < 1e-12);
}
