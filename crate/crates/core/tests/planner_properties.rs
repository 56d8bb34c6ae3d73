//! Property and cross-oracle tests for the outer planner.

use proptest::prelude::*;
use uavlc_core::assoc::run_association;
use uavlc_core::plan::{
    baseline_fixed_placement, check_constraints, exhaustive_solve, objective, optimize_placement,
    plan, PlannerConfig,
};
use uavlc_core::{NetworkParams, Placement, Point2, Scenario, SeededRng, UavId};

fn scenario_strategy() -> impl Strategy<Value = (Scenario, PlannerConfig)> {
    let user = (0.0..200.0f64, 0.0..200.0f64).prop_map(|(x, y)| Point2::new(x, y));
    (
        prop::collection::vec(user, 1..40),
        1usize..9,
        any::<u64>(),
    )
        .prop_map(|(users, capacity, seed)| {
            let params = NetworkParams { capacity, ..NetworkParams::default() };
            let scenario = Scenario::new(users, params, 0).unwrap();
            let cfg = PlannerConfig { seed, ..PlannerConfig::default() };
            (scenario, cfg)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The planner's first candidate replays the fixed-placement baseline on
    /// the same stream, so its final objective can never fall below it.
    #[test]
    fn plan_dominates_the_baseline((scenario, cfg) in scenario_strategy()) {
        let planned = plan(&scenario, &cfg);
        let base = baseline_fixed_placement(&scenario, &cfg);
        prop_assert!(
            planned.objective >= base.objective,
            "plan {} fell below baseline {}",
            planned.objective,
            base.objective
        );
    }

    /// `feasible` is exactly "the checker finds nothing", and the reported
    /// objective decomposes into its two weighted terms.
    #[test]
    fn plan_reports_are_internally_consistent((scenario, cfg) in scenario_strategy()) {
        let result = plan(&scenario, &cfg);
        let report = check_constraints(&result.placement, &result.association, &scenario);
        prop_assert_eq!(result.feasible, report.is_feasible());

        let recomputed = scenario.params.weight_rate * result.sum_rate
            + scenario.params.weight_d2d * result.d2d_count as f64;
        prop_assert!(
            (result.objective - recomputed).abs() <= 1e-9,
            "objective {} does not decompose into {} parts",
            result.objective,
            recomputed
        );
        let direct = objective(&result.placement, &result.association, &scenario);
        prop_assert!((result.objective - direct).abs() <= 1e-9);

        for pair in result.trace.windows(2) {
            prop_assert!(pair[1].best_objective >= pair[0].best_objective);
        }
    }

    /// Same inputs, same plan — bit for bit.
    #[test]
    fn plan_is_deterministic((scenario, cfg) in scenario_strategy()) {
        prop_assert_eq!(plan(&scenario, &cfg), plan(&scenario, &cfg));
    }

    /// Moving a UAV to its served users' disk center never increases the
    /// farthest served distance (that is the disk center's defining
    /// property), hence never drops the weakest user's rate.
    #[test]
    fn placement_update_never_worsens_the_farthest_user(
        (scenario, cfg) in scenario_strategy(),
        px in 0.0..200.0f64,
        py in 0.0..200.0f64,
    ) {
        let current = Placement::new(Point2::new(px, py), Point2::new(200.0 - px, 200.0 - py));
        let mut rng = SeededRng::new(cfg.seed);
        let assoc = run_association(&scenario, &current, &mut rng, 50);
        let (moved, _) = optimize_placement(&scenario, &assoc, &current, &mut rng);

        for uav in [UavId::Uav1, UavId::Uav2] {
            let served = assoc.served_users(uav);
            if served.is_empty() {
                prop_assert_eq!(moved.position(uav), current.position(uav));
                continue;
            }
            let max_at = |p: Point2| {
                served
                    .iter()
                    .map(|&i| p.dist(scenario.users[i]))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let before = max_at(current.position(uav));
            let after = max_at(moved.position(uav));
            prop_assert!(
                after <= before + 1e-9,
                "{uav}: farthest served distance grew from {before} to {after}"
            );
        }
    }
}

/// Cross-oracle bound on small instances: the heuristic can never beat the
/// exhaustive optimum (both use the same placement rule), and the measured
/// optimality gap is printed for the record — no gap ratio is asserted.
#[test]
fn heuristic_never_beats_exhaustive_and_gap_is_logged() {
    let mut worst_gap = 0.0f64;
    let mut gap_sum = 0.0f64;
    let mut exact_wins = 0usize;
    let runs = 100;

    for seed in 0..runs as u64 {
        let mut rng = SeededRng::new(seed);
        let n = 2 + rng.index(7); // 2..=8 users
        let users: Vec<Point2> = (0..n)
            .map(|_| Point2::new(rng.uniform(0.0, 200.0), rng.uniform(0.0, 200.0)))
            .collect();
        let capacity = 1 + rng.index(2); // 1 or 2
        let params = NetworkParams { capacity, ..NetworkParams::default() };
        let scenario = Scenario::new(users, params, seed).unwrap();

        let cfg = PlannerConfig { seed, ..PlannerConfig::default() };
        let heuristic = plan(&scenario, &cfg);
        let exact = exhaustive_solve(&scenario).unwrap();

        assert!(
            heuristic.objective <= exact.objective + 1e-9,
            "seed {seed}: heuristic {} beat the exhaustive optimum {}",
            heuristic.objective,
            exact.objective
        );
        assert!(exact.feasible, "seed {seed}: exhaustive result must be feasible");

        let gap = (exact.objective - heuristic.objective).max(0.0);
        worst_gap = worst_gap.max(gap);
        gap_sum += gap;
        if gap > 1e-9 {
            exact_wins += 1;
        }
    }

    println!(
        "optimality gap over {runs} instances: mean {:.6}, worst {:.6}, exhaustive strictly better on {exact_wins}",
        gap_sum / runs as f64,
        worst_gap
    );
}

/// The termination clause: a feasible, converged run stops before the
/// iteration cap, and every iteration recorded in the trace carries a
/// feasibility verdict consistent with its own constraint check.
#[test]
fn planner_stops_early_once_converged() {
    let users: Vec<Point2> = (0..30)
        .map(|i| Point2::new(40.0 + 9.0 * (i % 6) as f64, 40.0 + 9.0 * (i / 6) as f64))
        .collect();
    let scenario = Scenario::new(users, NetworkParams::default(), 0).unwrap();
    let cfg = PlannerConfig { max_outer_iters: 200, seed: 21, ..PlannerConfig::default() };
    let result = plan(&scenario, &cfg);
    assert!(result.feasible);
    assert!(
        result.trace.len() < 200,
        "a compact feasible instance must converge, ran {} iterations",
        result.trace.len()
    );
}
