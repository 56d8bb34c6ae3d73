//! Property tests for the cluster-based association pipeline.

use proptest::prelude::*;
use uavlc_core::assoc::{
    assign_clusters_to_uavs, assign_to_centers, center_score, init_centers, reselect_centers,
    run_association,
};
use uavlc_core::plan::check_constraints;
use uavlc_core::{NetworkParams, Placement, Point2, Scenario, SeededRng, UavId};

fn scenario_strategy() -> impl Strategy<Value = (Scenario, u64)> {
    let user = (0.0..200.0f64, 0.0..200.0f64).prop_map(|(x, y)| Point2::new(x, y));
    (
        prop::collection::vec(user, 1..50),
        1usize..9,
        any::<u64>(),
    )
        .prop_map(|(users, capacity, seed)| {
            let params = NetworkParams { capacity, ..NetworkParams::default() };
            (Scenario::new(users, params, 0).unwrap(), seed)
        })
}

fn placement_strategy() -> impl Strategy<Value = Placement> {
    let p = (0.0..200.0f64, 0.0..200.0f64).prop_map(|(x, y)| Point2::new(x, y));
    (p.clone(), p).prop_map(|(a, b)| Placement::new(a, b))
}

proptest! {
    /// The headline cross-module invariant: whatever the geometry, capacity,
    /// seed, or placement, the association that comes back passes the full
    /// constraint checker with zero violations.
    #[test]
    fn associations_are_always_feasible(
        (scenario, seed) in scenario_strategy(),
        placement in placement_strategy(),
    ) {
        let mut rng = SeededRng::new(seed);
        let assoc = run_association(&scenario, &placement, &mut rng, 50);
        let report = check_constraints(&placement, &assoc, &scenario);
        prop_assert!(
            report.is_feasible(),
            "association violated constraints: {report}"
        );
        prop_assert_eq!(assoc.len(), scenario.users.len());
    }

    /// Labels are distance-optimal: no user sits strictly closer to a
    /// center other than the one it was labeled with.
    #[test]
    fn labels_minimize_center_distance((scenario, seed) in scenario_strategy()) {
        let mut rng = SeededRng::new(seed);
        let state = init_centers(&scenario, &mut rng).unwrap();
        let state = assign_to_centers(&scenario, state);
        for (n, &label) in state.labels.iter().enumerate() {
            let own = scenario.users[n].dist_sq(scenario.users[state.centers[label]]);
            for (k, &c) in state.centers.iter().enumerate() {
                let other = scenario.users[n].dist_sq(scenario.users[c]);
                prop_assert!(
                    own <= other,
                    "user {n} labeled to cluster {label} at {own} but cluster {k} is at {other}"
                );
            }
        }
    }

    /// UAV tags respect capacity and only go to clusters whose center the
    /// UAV covers.
    #[test]
    fn uav_tags_respect_capacity_and_coverage(
        (scenario, seed) in scenario_strategy(),
        placement in placement_strategy(),
    ) {
        let mut rng = SeededRng::new(seed);
        let state = init_centers(&scenario, &mut rng).unwrap();
        let state = assign_to_centers(&scenario, state);
        let state = assign_clusters_to_uavs(&scenario, state, &placement);
        for uav in [UavId::Uav1, UavId::Uav2] {
            let tagged: Vec<usize> = (0..state.centers.len())
                .filter(|&k| state.uav_of_cluster[k] == Some(uav))
                .collect();
            prop_assert!(
                tagged.len() <= scenario.params.capacity,
                "{uav} got {} clusters with capacity {}",
                tagged.len(),
                scenario.params.capacity
            );
            for k in tagged {
                let center = scenario.users[state.centers[k]];
                prop_assert!(
                    scenario.params.covers(placement.position(uav), center),
                    "cluster {k} tagged to {uav} but its center is not covered"
                );
            }
        }
    }

    /// Reselect is an argmax: no cluster member covered by the serving UAV
    /// outscores the chosen center.
    #[test]
    fn reselect_is_an_argmax(
        (scenario, seed) in scenario_strategy(),
        placement in placement_strategy(),
    ) {
        let mut rng = SeededRng::new(seed);
        let state = init_centers(&scenario, &mut rng).unwrap();
        let state = assign_to_centers(&scenario, state);
        let state = assign_clusters_to_uavs(&scenario, state, &placement);
        let labels = state.labels.clone();
        let (state, _assoc) = reselect_centers(&scenario, state, &placement);

        let mut members_of = vec![Vec::new(); state.centers.len()];
        for (n, &k) in labels.iter().enumerate() {
            members_of[k].push(n);
        }
        for k in 0..state.centers.len() {
            let Some(uav_id) = state.uav_of_cluster[k] else { continue };
            let uav = placement.position(uav_id);
            let chosen = state.centers[k];
            let chosen_score = center_score(chosen, &members_of[k], uav, &scenario);
            for &m in &members_of[k] {
                if !scenario.params.covers(uav, scenario.users[m]) {
                    continue;
                }
                let s = center_score(m, &members_of[k], uav, &scenario);
                prop_assert!(
                    s <= chosen_score,
                    "member {m} scores {s} > chosen center {chosen} at {chosen_score}"
                );
            }
        }
    }

    /// Identical inputs give identical associations, whatever the order of
    /// invocation.
    #[test]
    fn association_is_deterministic(
        (scenario, seed) in scenario_strategy(),
        placement in placement_strategy(),
    ) {
        let a = run_association(&scenario, &placement, &mut SeededRng::new(seed), 50);
        let b = run_association(&scenario, &placement, &mut SeededRng::new(seed), 50);
        prop_assert_eq!(a, b);
    }
}
