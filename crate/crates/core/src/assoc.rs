//! Cluster-based user association.
//!
//! The association loop works in rounds over a set of cluster centers:
//!
//! 1. [`init_centers`] draws `2K` distinct users as initial centers
//!    (every user, if fewer than `2K` exist).
//! 2. [`assign_to_centers`] labels every user with its nearest center.
//! 3. [`assign_clusters_to_uavs`] sorts clusters by the gap between their
//!    center's distance to UAV 1 and to UAV 2, then hands out at most `K`
//!    covered clusters to each UAV in that order.
//! 4. [`reselect_centers`] exhaustively re-picks each served cluster's
//!    center as the member with the best [`center_score`], tags that member
//!    UAV-served, and attaches in-range cluster mates to it as D2D users.
//!
//! [`run_association`] iterates 2–4 until the center set stops changing (or
//! a cycle / the round limit is hit) and returns the best-objective round.
//! All tie-breaks go to the lowest index, so the whole pipeline is a pure
//! function of (scenario, placement, seed).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::model::{Placement, Point2, Scenario, UavId};
use crate::rng::SeededRng;
use crate::Error;

/// How a single user is served.
///
/// The derived ordering (`UavServed(Uav1)` < `UavServed(Uav2)` <
/// `D2dServed(k)` < `Unserved`, with smaller relay indices first) is the
/// tie-break key for the exhaustive solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Serve {
    /// Direct optical downlink from the given UAV (the user is a centroid).
    UavServed(UavId),
    /// Relayed over a device-to-device link from the centroid with this
    /// user index.
    D2dServed(usize),
    /// No service this round.
    Unserved,
}

/// A complete association: one [`Serve`] tag per user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Association {
    pub serves: Vec<Serve>,
}

impl Association {
    /// An association with every one of `n` users unserved.
    pub fn all_unserved(n: usize) -> Association {
        Association { serves: vec![Serve::Unserved; n] }
    }

    pub fn len(&self) -> usize {
        self.serves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.serves.is_empty()
    }

    /// Indices of the users served directly by `uav`, ascending.
    pub fn served_users(&self, uav: UavId) -> Vec<usize> {
        self.serves
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Serve::UavServed(uav))
            .map(|(n, _)| n)
            .collect()
    }

    /// Number of users served directly by `uav`.
    pub fn uav_count(&self, uav: UavId) -> usize {
        self.serves.iter().filter(|s| **s == Serve::UavServed(uav)).count()
    }

    /// Number of users served over D2D relays.
    pub fn d2d_count(&self) -> usize {
        self.serves.iter().filter(|s| matches!(s, Serve::D2dServed(_))).count()
    }

    /// Number of users with no service.
    pub fn unserved_count(&self) -> usize {
        self.serves.iter().filter(|s| **s == Serve::Unserved).count()
    }
}

/// Working state of the association loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterState {
    /// Cluster centers as user indices; cluster `k`'s center is `centers[k]`.
    pub centers: Vec<usize>,
    /// Per-user cluster id (index into `centers`); empty until
    /// [`assign_to_centers`] runs.
    pub labels: Vec<usize>,
    /// Per-cluster serving UAV; `None` means unassigned. Empty until
    /// [`assign_clusters_to_uavs`] runs.
    pub uav_of_cluster: Vec<Option<UavId>>,
}

/// Draws the initial cluster centers: `2·capacity` distinct users chosen
/// uniformly without replacement, or every user when fewer exist. Labels and
/// UAV tags start unset.
pub fn init_centers(scenario: &Scenario, rng: &mut SeededRng) -> Result<ClusterState, Error> {
    let n = scenario.users.len();
    if n == 0 {
        return Err(Error::EmptyScenario);
    }
    let want = 2 * scenario.params.capacity;
    let centers = rng.sample_distinct(n, want.min(n));
    Ok(ClusterState { centers, labels: Vec::new(), uav_of_cluster: Vec::new() })
}

/// Labels every user with the nearest center (ties to the lowest cluster
/// index). A center always labels to its own cluster, even when another
/// center coincides with it.
pub fn assign_to_centers(scenario: &Scenario, mut state: ClusterState) -> ClusterState {
    assert!(!state.centers.is_empty(), "assign_to_centers requires at least one center");
    let users = &scenario.users;
    state.labels = users
        .iter()
        .enumerate()
        .map(|(n, &w)| {
            if let Some(own) = state.centers.iter().position(|&c| c == n) {
                return own;
            }
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (k, &c) in state.centers.iter().enumerate() {
                let d = w.dist_sq(users[c]);
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            best
        })
        .collect();
    state
}

/// Assigns clusters to UAVs by the distance-gap ordering.
///
/// Clusters are sorted ascending by `‖uav1 − c_k‖ − ‖uav2 − c_k‖` (ground
/// distances; ties to the lower cluster index), so clusters leaning toward
/// UAV 1 come first. Walking that order, the first `K` clusters whose
/// center UAV 1 covers are tagged `Uav1`; of the remainder, the first `K`
/// whose center UAV 2 covers are tagged `Uav2`; the rest stay unassigned.
pub fn assign_clusters_to_uavs(
    scenario: &Scenario,
    mut state: ClusterState,
    placement: &Placement,
) -> ClusterState {
    let params = &scenario.params;
    let users = &scenario.users;
    let (u1, u2) = (placement.position(UavId::Uav1), placement.position(UavId::Uav2));

    let mut order: Vec<usize> = (0..state.centers.len()).collect();
    let gap = |k: usize| {
        let c = users[state.centers[k]];
        u1.dist(c) - u2.dist(c)
    };
    order.sort_by(|&a, &b| gap(a).total_cmp(&gap(b)).then(a.cmp(&b)));

    let mut tags = vec![None; state.centers.len()];
    let mut remaining = Vec::new();
    let mut taken1 = 0usize;
    for &k in &order {
        let c = users[state.centers[k]];
        if taken1 < params.capacity && params.covers(u1, c) {
            tags[k] = Some(UavId::Uav1);
            taken1 += 1;
        } else {
            remaining.push(k);
        }
    }
    let mut taken2 = 0usize;
    for &k in &remaining {
        if taken2 == params.capacity {
            break;
        }
        let c = users[state.centers[k]];
        if params.covers(u2, c) {
            tags[k] = Some(UavId::Uav2);
            taken2 += 1;
        }
    }
    state.uav_of_cluster = tags;
    state
}

/// Candidate-center score: a weighted sum of the candidate's downlink rate
/// from `uav` and the number of other cluster members strictly within D2D
/// range of it.
pub fn center_score(
    candidate: usize,
    cluster_members: &[usize],
    uav: Point2,
    scenario: &Scenario,
) -> f64 {
    debug_assert!(
        cluster_members.contains(&candidate),
        "candidate {candidate} must be a cluster member"
    );
    let params = &scenario.params;
    let w = scenario.users[candidate];
    let rate = params.link_rate(params.channel_gain(uav, w));
    let neighbors = cluster_members
        .iter()
        .filter(|&&k| k != candidate && scenario.users[k].dist(w) < params.d2d_range)
        .count();
    params.weight_rate * rate + params.weight_d2d * neighbors as f64
}

/// Re-picks every served cluster's center and derives the association.
///
/// For each UAV-assigned cluster the member with the highest
/// [`center_score`] — among members its UAV actually covers, ties to the
/// lowest user index — becomes the center and is tagged UAV-served; other
/// members strictly within D2D range of it become its D2D users, the rest
/// are unserved. Members of unassigned clusters are unserved. Restricting
/// candidates to covered members keeps every returned association free of
/// illuminance violations; should no member be covered at all, the cluster
/// is demoted to unassigned.
pub fn reselect_centers(
    scenario: &Scenario,
    mut state: ClusterState,
    placement: &Placement,
) -> (ClusterState, Association) {
    assert_eq!(
        state.uav_of_cluster.len(),
        state.centers.len(),
        "reselect_centers requires UAV tags for every cluster"
    );
    let params = &scenario.params;
    let mut serves = vec![Serve::Unserved; scenario.users.len()];

    let mut members_of = vec![Vec::new(); state.centers.len()];
    for (n, &k) in state.labels.iter().enumerate() {
        members_of[k].push(n);
    }

    for k in 0..state.centers.len() {
        let Some(uav_id) = state.uav_of_cluster[k] else {
            continue;
        };
        let uav = placement.position(uav_id);
        let members = &members_of[k];

        let mut best: Option<(usize, f64)> = None;
        for &cand in members {
            if !params.covers(uav, scenario.users[cand]) {
                continue;
            }
            let score = center_score(cand, members, uav, scenario);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((cand, score));
            }
        }
        let Some((center, _)) = best else {
            state.uav_of_cluster[k] = None;
            continue;
        };

        state.centers[k] = center;
        serves[center] = Serve::UavServed(uav_id);
        for &m in members {
            if m != center && scenario.users[m].dist(scenario.users[center]) < params.d2d_range {
                serves[m] = Serve::D2dServed(center);
            }
        }
    }

    (state, Association { serves })
}

/// Runs the full association loop for a fixed placement.
///
/// Rounds of assign → UAV-tag → reselect repeat until the center set is
/// unchanged, a previously seen center set reappears (cycle), or
/// `max_rounds` is reached. The association of the best-objective round is
/// returned; on ties the earliest such round wins.
pub fn run_association(
    scenario: &Scenario,
    placement: &Placement,
    rng: &mut SeededRng,
    max_rounds: usize,
) -> Association {
    assert!(max_rounds >= 1, "max_rounds must be at least 1");
    let mut state = init_centers(scenario, rng).expect("scenario has users by construction");

    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut best: Option<(f64, Association)> = None;

    for _ in 0..max_rounds {
        seen.insert(state.centers.clone());
        let before = state.centers.clone();

        state = assign_to_centers(scenario, state);
        state = assign_clusters_to_uavs(scenario, state, placement);
        let (next, assoc) = reselect_centers(scenario, state, placement);
        state = next;

        let obj = crate::plan::objective(placement, &assoc, scenario);
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, assoc));
        }

        if state.centers == before || seen.contains(&state.centers) {
            break;
        }
    }

    best.expect("at least one round ran").1
}
