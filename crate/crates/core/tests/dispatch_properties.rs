use proptest::prelude::*;

use pvdiesel_core::diesel::{CommitmentState, DieselGenSpec};
use pvdiesel_core::dispatch::{
    brute_force_oracle, optimize_horizon_dp, optimize_series_greedy, random_instance,
    schedule_objective, validate_schedule, CostParams, StepInputs,
};

fn objective_gap_bound(fleet: &[DieselGenSpec], costs: &CostParams, steps: usize) -> f64 {
    let a = fleet.iter().map(|g| g.fuel_a).fold(0.0, f64::max);
    a * costs.fuel_price * costs.w1 * 0.5 * steps as f64 + 1e-9
}

#[test]
fn dp_matches_oracle_on_seeded_instances() {
    let mut checked = 0;
    for seed in 1000..1040 {
        let inst = random_instance(seed);
        let dp = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &inst.costs);
        let bf = brute_force_oracle(&inst.initial, &inst.series, &inst.fleet, &inst.costs, 0.5);
        match (dp, bf) {
            (Ok(dp), Ok(bf)) => {
                let gap = (schedule_objective(&dp) - bf.objective).abs();
                assert!(
                    gap <= objective_gap_bound(&inst.fleet, &inst.costs, inst.series.len()),
                    "seed {seed}: gap {gap}"
                );
                checked += 1;
            }
            (Err(_), Err(_)) => {}
            (dp, bf) => panic!("seed {seed}: dp ok {} oracle ok {}", dp.is_ok(), bf.is_ok()),
        }
    }
    assert!(checked >= 30, "only {checked} feasible instances");
}

fn instance_strategy() -> impl Strategy<Value = u64> {
    0u64..100_000
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_never_worse_than_greedy(seed in instance_strategy()) {
        let inst = random_instance(seed);
        let dp = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &inst.costs);
        let gr = optimize_series_greedy(&inst.initial, &inst.series, &inst.fleet, &inst.costs);
        if let (Ok(dp), Ok(gr)) = (&dp, &gr) {
            prop_assert!(schedule_objective(dp) <= schedule_objective(gr) + 1e-9);
        }
        // greedy feasible implies dp feasible
        if gr.is_ok() {
            prop_assert!(dp.is_ok());
        }
    }

    #[test]
    fn dp_schedules_have_no_violations(seed in instance_strategy()) {
        let inst = random_instance(seed);
        if let Ok(dp) = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &inst.costs) {
            let v = validate_schedule(&dp, &inst.series, &inst.fleet, &inst.initial);
            prop_assert!(v.is_empty(), "{:?}", v);
        }
    }

    #[test]
    fn objective_scales_with_weights(seed in instance_strategy(), k in 0.1f64..10.0) {
        let inst = random_instance(seed);
        let scaled = CostParams { w1: inst.costs.w1 * k, w2: inst.costs.w2 * k, ..inst.costs };
        let a = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &inst.costs);
        let b = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &scaled);
        if let (Ok(a), Ok(b)) = (a, b) {
            let (ja, jb) = (schedule_objective(&a), schedule_objective(&b));
            prop_assert!((jb - k * ja).abs() <= 1e-7 * (1.0 + jb.abs()), "{} vs {}", jb, k * ja);
        }
    }

    #[test]
    fn more_pv_never_raises_objective(seed in instance_strategy(), extra in 0.0f64..40.0) {
        let inst = random_instance(seed);
        let more: Vec<StepInputs> = inst
            .series
            .iter()
            .map(|s| StepInputs { pv_available_kw: s.pv_available_kw + extra, ..*s })
            .collect();
        let a = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &inst.costs);
        let b = optimize_horizon_dp(&inst.initial, &more, &inst.fleet, &inst.costs);
        if let Ok(a) = a {
            let b = b.expect("extra PV keeps the instance feasible");
            prop_assert!(schedule_objective(&b) <= schedule_objective(&a) + 1e-9);
        }
    }
}

#[test]
fn blackout_needs_a_running_generator() {
    let fleet = vec![DieselGenSpec::new("g", 100.0)];
    let series = vec![StepInputs {
        load_kw: 50.0,
        pv_available_kw: 200.0,
        grid_on: false,
        grid_max_kw: 100.0,
        dt_hours: 1.0,
    }];
    let s = optimize_horizon_dp(
        &CommitmentState::all_off(1),
        &series,
        &fleet,
        &CostParams::default(),
    )
    .unwrap();
    assert!(s[0].state.is_on(0));
    assert!((s[0].diesel_kw[0] - 30.0).abs() < 1e-9);
    assert!((s[0].pv_dispatch_kw - 20.0).abs() < 1e-9);
    assert_eq!(s[0].export_kw, 0.0);
}
