//! Outer planning loop, constraint checker, and exhaustive oracle.
//!
//! [`plan`] alternates the association loop with a placement update that
//! moves each UAV to the center of the smallest enclosing disk of its served
//! users (the disk center is the position maximizing the worst served
//! user's rate, so it can only help the weakest link). Because the
//! association step can oscillate and the disk move optimizes the worst
//! user rather than the sum, the loop keeps the best candidate seen rather
//! than assuming per-step improvement; both the pre-move and post-move
//! solutions of every iteration are candidates, which makes the planner
//! dominate [`baseline_fixed_placement`] by construction.
//!
//! [`check_constraints`] re-verifies every solution against the original
//! problem constraints, labeled `8.b` through `8.g/8.h`; [`exhaustive_solve`]
//! is the small-instance global optimum under the same placement rule.

use serde::{Deserialize, Serialize};

use crate::assoc::{run_association, Association, Serve};
use crate::mindisk::{disk_from_two, smallest_enclosing_disk};
use crate::model::{sum_rate, Placement, Point2, Scenario, UavId};
use crate::rng::SeededRng;
use crate::Error;

/// Knobs of the outer planning loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Maximum outer iterations (association + placement update).
    pub max_outer_iters: usize,
    /// Round limit inside each association run.
    pub max_association_rounds: usize,
    /// Stop once the best objective improves by no more than this while the
    /// current solution is feasible.
    pub objective_tolerance: f64,
    /// Seed of the planner's random stream.
    pub seed: u64,
    /// Where both UAVs start.
    pub initial_placement: Placement,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            max_outer_iters: 20,
            max_association_rounds: 50,
            objective_tolerance: 1e-6,
            seed: 0,
            initial_placement: Placement::corner(),
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_outer_iters < 1 {
            return Err(Error::InvalidParameter {
                name: "max_outer_iters",
                reason: "must be at least 1".into(),
            });
        }
        if self.max_association_rounds < 1 {
            return Err(Error::InvalidParameter {
                name: "max_association_rounds",
                reason: "must be at least 1".into(),
            });
        }
        if !self.objective_tolerance.is_finite() || self.objective_tolerance < 0.0 {
            return Err(Error::InvalidParameter {
                name: "objective_tolerance",
                reason: format!("must be finite and non-negative, got {}", self.objective_tolerance),
            });
        }
        for (name, p) in [
            ("initial_placement.uav1", self.initial_placement.uav1),
            ("initial_placement.uav2", self.initial_placement.uav2),
        ] {
            if !p.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite, got {p}") });
            }
        }
        Ok(())
    }
}

/// One outer iteration of [`plan`]: the post-move candidate of that
/// iteration plus the running best across everything seen so far.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Objective of this iteration's solution (after the placement update).
    pub objective: f64,
    /// Best objective over all candidates up to and including this iteration.
    pub best_objective: f64,
    pub placement: Placement,
    pub feasible: bool,
}

/// A finished plan: placement, association, and its evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub placement: Placement,
    pub association: Association,
    /// `weight_rate · sum_rate + weight_d2d · d2d_count`.
    pub objective: f64,
    /// Total downlink rate over UAV-served users, bit/s/Hz.
    pub sum_rate: f64,
    /// Number of users served over D2D relays.
    pub d2d_count: usize,
    /// Per-user illuminance in lux from the UAV behind each user's service
    /// chain (a relayed user reads its centroid's UAV); unserved users
    /// report 0.
    pub per_user_illuminance: Vec<f64>,
    /// True iff [`check_constraints`] returns an empty report.
    pub feasible: bool,
    pub trace: Vec<TraceEntry>,
}

/// One broken constraint, labeled with the id of the original problem
/// formulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// `8.b` (one server per user), `8.c` (UAV capacity), `8.d` (relay
    /// target must be UAV-served), `8.e` (D2D range), `8.f` (illuminance
    /// threshold), or `8.g/8.h` (structural: self-relay / bad relay index).
    pub constraint: String,
    /// Offending user indices.
    pub users: Vec<usize>,
    /// Measured quantity (count, meters, or lux depending on the constraint).
    pub measured: f64,
    /// The bound that `measured` violates.
    pub bound: f64,
    /// Human-readable account of the breach.
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

/// Every constraint violation of a solution; empty means feasible.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The planning objective: `weight_rate · sum_rate + weight_d2d · d2d_count`.
pub fn objective(placement: &Placement, association: &Association, scenario: &Scenario) -> f64 {
    let params = &scenario.params;
    params.weight_rate * sum_rate(placement, association, scenario)
        + params.weight_d2d * association.d2d_count() as f64
}

/// Checks a solution against every original constraint and reports all
/// breaches (not just the first).
pub fn check_constraints(
    placement: &Placement,
    association: &Association,
    scenario: &Scenario,
) -> ViolationReport {
    let params = &scenario.params;
    let users = &scenario.users;
    let n = users.len();
    let mut violations = Vec::new();

    // 8.b: exactly one serve tag per user. The tag vector makes multiple
    // tags per user unrepresentable, so only a length mismatch can breach it.
    if association.serves.len() != n {
        violations.push(Violation {
            constraint: "8.b".into(),
            users: Vec::new(),
            measured: association.serves.len() as f64,
            bound: n as f64,
            detail: format!(
                "association carries {} serve tags for {} users",
                association.serves.len(),
                n
            ),
        });
        return ViolationReport { violations };
    }

    // 8.c: at most `capacity` users per UAV.
    for uav in [UavId::Uav1, UavId::Uav2] {
        let served = association.served_users(uav);
        if served.len() > params.capacity {
            violations.push(Violation {
                constraint: "8.c".into(),
                users: served.clone(),
                measured: served.len() as f64,
                bound: params.capacity as f64,
                detail: format!(
                    "{uav} serves {} users, capacity is {}",
                    served.len(),
                    params.capacity
                ),
            });
        }
    }

    for (i, serve) in association.serves.iter().enumerate() {
        match *serve {
            Serve::UavServed(uav) => {
                // 8.f: every direct user must clear the illuminance threshold.
                let pos = placement.position(uav);
                if !params.covers(pos, users[i]) {
                    let illum = params.illuminance(params.channel_gain(pos, users[i]));
                    violations.push(Violation {
                        constraint: "8.f".into(),
                        users: vec![i],
                        measured: illum,
                        bound: params.illum_threshold,
                        detail: format!(
                            "user {i} receives {illum:.6} lux from {uav}, threshold is {} lux",
                            params.illum_threshold
                        ),
                    });
                }
            }
            Serve::D2dServed(k) => {
                if k >= n {
                    // Structural: the relay target does not exist.
                    violations.push(Violation {
                        constraint: "8.g/8.h".into(),
                        users: vec![i],
                        measured: k as f64,
                        bound: n as f64,
                        detail: format!("user {i} relays to nonexistent user {k} (only {n} users)"),
                    });
                    continue;
                }
                if k == i {
                    // Structural: no user may serve itself.
                    violations.push(Violation {
                        constraint: "8.g/8.h".into(),
                        users: vec![i],
                        measured: 0.0,
                        bound: 0.0,
                        detail: format!("user {i} relays to itself"),
                    });
                    continue;
                }
                // 8.d: the relay target must itself be UAV-served.
                if !matches!(association.serves[k], Serve::UavServed(_)) {
                    violations.push(Violation {
                        constraint: "8.d".into(),
                        users: vec![i, k],
                        measured: 0.0,
                        bound: 1.0,
                        detail: format!("user {i} relays to user {k}, which is not UAV-served"),
                    });
                }
                // 8.e: the relay pair must be strictly within D2D range.
                let dist = users[i].dist(users[k]);
                if dist >= params.d2d_range {
                    violations.push(Violation {
                        constraint: "8.e".into(),
                        users: vec![i, k],
                        measured: dist,
                        bound: params.d2d_range,
                        detail: format!(
                            "users {i} and {k} are {dist:.3} m apart, D2D range is {} m",
                            params.d2d_range
                        ),
                    });
                }
            }
            Serve::Unserved => {}
        }
    }

    ViolationReport { violations }
}

/// Moves each UAV to the smallest-enclosing-disk center of its served users.
///
/// A UAV with no served users keeps its position from `current`. The
/// returned flags report, per UAV, whether every served user is still
/// covered from the new position — the disk center minimizes the farthest
/// served distance, so a placement that covered its users cannot lose them
/// by this move.
pub fn optimize_placement(
    scenario: &Scenario,
    association: &Association,
    current: &Placement,
    rng: &mut SeededRng,
) -> (Placement, [bool; 2]) {
    let mut placement = *current;
    let mut feasible = [true; 2];

    for uav in [UavId::Uav1, UavId::Uav2] {
        let served = association.served_users(uav);
        if served.is_empty() {
            continue;
        }
        let pts: Vec<Point2> = served.iter().map(|&i| scenario.users[i]).collect();
        let disk = smallest_enclosing_disk(&pts, rng).expect("served set is non-empty");
        placement.set_position(uav, disk.center);
        feasible[uav.index()] =
            pts.iter().all(|&p| scenario.params.covers(disk.center, p));
    }

    (placement, feasible)
}

#[derive(Clone)]
struct Candidate {
    objective: f64,
    placement: Placement,
    association: Association,
    feasible: bool,
}

/// Keeps `best` pointing at the highest-objective candidate; strict
/// improvement only, so the earliest of equals wins.
fn consider(best: &mut Option<Candidate>, cand: &Candidate) {
    if best.as_ref().is_none_or(|b| cand.objective > b.objective) {
        *best = Some(cand.clone());
    }
}

fn evaluate(placement: &Placement, association: Association, scenario: &Scenario) -> Candidate {
    let objective = objective(placement, &association, scenario);
    let feasible = check_constraints(placement, &association, scenario).is_feasible();
    Candidate { objective, placement: *placement, association, feasible }
}

fn finish(c: Candidate, scenario: &Scenario, trace: Vec<TraceEntry>) -> PlanResult {
    let params = &scenario.params;
    let per_user_illuminance = scenario
        .users
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let uav = match c.association.serves[i] {
                Serve::UavServed(u) => Some(u),
                Serve::D2dServed(k) => match c.association.serves.get(k) {
                    Some(Serve::UavServed(u)) => Some(*u),
                    _ => None,
                },
                Serve::Unserved => None,
            };
            uav.map_or(0.0, |u| params.illuminance(params.channel_gain(c.placement.position(u), w)))
        })
        .collect();
    let sum_rate = sum_rate(&c.placement, &c.association, scenario);
    let d2d_count = c.association.d2d_count();
    PlanResult {
        placement: c.placement,
        association: c.association,
        objective: c.objective,
        sum_rate,
        d2d_count,
        per_user_illuminance,
        feasible: c.feasible,
        trace,
    }
}

/// Runs the alternating planner.
///
/// Each outer iteration re-runs the association for the current placement
/// on a fresh random stream, keeps that pre-move solution as a candidate,
/// moves the UAVs to their served users' disk centers, and keeps the moved
/// solution as a second candidate. The loop stops when the best objective
/// has improved by at most `objective_tolerance` since the previous
/// iteration while the current solution is feasible, or at the iteration
/// cap. The best feasible candidate wins; if nothing feasible was seen, the
/// best candidate overall is returned with `feasible = false`.
pub fn plan(scenario: &Scenario, cfg: &PlannerConfig) -> PlanResult {
    cfg.validate().expect("planner config must be valid");

    let mut rng = SeededRng::new(cfg.seed);
    let mut placement = cfg.initial_placement;
    let mut best_feasible: Option<Candidate> = None;
    let mut best_any: Option<Candidate> = None;
    let mut trace = Vec::new();
    let mut prev_best = f64::NEG_INFINITY;

    for iteration in 0..cfg.max_outer_iters {
        // Fresh stream per iteration; iteration 0 replays the fixed-placement
        // baseline exactly, which is what makes plan ≥ baseline structural.
        let mut assoc_rng = rng.fork();
        let association =
            run_association(scenario, &placement, &mut assoc_rng, cfg.max_association_rounds);

        let pre_move = evaluate(&placement, association, scenario);
        consider(&mut best_any, &pre_move);
        if pre_move.feasible {
            consider(&mut best_feasible, &pre_move);
        }

        let (moved, _per_uav) =
            optimize_placement(scenario, &pre_move.association, &placement, &mut rng);
        let post_move = evaluate(&moved, pre_move.association, scenario);
        consider(&mut best_any, &post_move);
        if post_move.feasible {
            consider(&mut best_feasible, &post_move);
        }

        let best_obj = best_any.as_ref().expect("a candidate exists").objective;
        trace.push(TraceEntry {
            iteration,
            objective: post_move.objective,
            best_objective: best_obj,
            placement: moved,
            feasible: post_move.feasible,
        });

        placement = moved;
        if best_obj - prev_best <= cfg.objective_tolerance && post_move.feasible {
            break;
        }
        prev_best = best_obj;
    }

    let chosen = best_feasible.or(best_any).expect("at least one iteration ran");
    finish(chosen, scenario, trace)
}

/// Evaluates the association loop at the initial placement, with no
/// placement update — the "do not move the UAVs" reference point. Uses the
/// same random stream as [`plan`]'s first iteration, so on equal inputs
/// `plan(...).objective ≥ baseline_fixed_placement(...).objective`.
pub fn baseline_fixed_placement(scenario: &Scenario, cfg: &PlannerConfig) -> PlanResult {
    cfg.validate().expect("planner config must be valid");

    let mut rng = SeededRng::new(cfg.seed);
    let mut assoc_rng = rng.fork();
    let placement = cfg.initial_placement;
    let association =
        run_association(scenario, &placement, &mut assoc_rng, cfg.max_association_rounds);
    let cand = evaluate(&placement, association, scenario);
    let trace = vec![TraceEntry {
        iteration: 0,
        objective: cand.objective,
        best_objective: cand.objective,
        placement,
        feasible: cand.feasible,
    }];
    finish(cand, scenario, trace)
}

/// Size guard of [`exhaustive_solve`].
pub const EXHAUSTIVE_MAX_USERS: usize = 10;
/// Capacity guard of [`exhaustive_solve`].
pub const EXHAUSTIVE_MAX_CAPACITY: usize = 2;

/// Global optimum on small instances by full enumeration.
///
/// Every pair of disjoint UAV-served sets (each at most `capacity` large)
/// is tried; each UAV sits at the smallest-enclosing-disk center of its
/// set (at the corner when it serves nobody), assignments whose users are
/// not all covered are discarded, and every remaining user relays to its
/// nearest in-range centroid (D2D never costs anything and earns
/// `weight_d2d`, so attaching every eligible user is optimal). Objective
/// ties break toward the lexicographically smallest serve vector.
pub fn exhaustive_solve(scenario: &Scenario) -> Result<PlanResult, Error> {
    let n = scenario.users.len();
    let k = scenario.params.capacity;
    if n > EXHAUSTIVE_MAX_USERS || k > EXHAUSTIVE_MAX_CAPACITY {
        return Err(Error::InstanceTooLarge {
            users: n,
            max_users: EXHAUSTIVE_MAX_USERS,
            capacity: k,
            max_capacity: EXHAUSTIVE_MAX_CAPACITY,
        });
    }

    let params = &scenario.params;
    let users = &scenario.users;
    let masks: Vec<u32> =
        (0u32..1 << n).filter(|m| (m.count_ones() as usize) <= k).collect();

    let center_of = |mask: u32| -> Option<Point2> {
        let pts: Vec<Point2> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| users[i]).collect();
        match pts.len() {
            0 => None,
            1 => Some(pts[0]),
            _ => Some(disk_from_two(pts[0], pts[1]).center),
        }
    };

    let mut best: Option<(f64, Placement, Vec<Serve>)> = None;
    for &m1 in &masks {
        for &m2 in &masks {
            if m1 & m2 != 0 {
                continue;
            }
            let mut placement = Placement::corner();
            if let Some(c) = center_of(m1) {
                placement.uav1 = c;
            }
            if let Some(c) = center_of(m2) {
                placement.uav2 = c;
            }

            let covered = (0..n).all(|i| {
                if m1 & (1 << i) != 0 {
                    params.covers(placement.uav1, users[i])
                } else if m2 & (1 << i) != 0 {
                    params.covers(placement.uav2, users[i])
                } else {
                    true
                }
            });
            if !covered {
                continue;
            }

            let mut serves = vec![Serve::Unserved; n];
            let mut centroids = Vec::new();
            for i in 0..n {
                if m1 & (1 << i) != 0 {
                    serves[i] = Serve::UavServed(UavId::Uav1);
                    centroids.push(i);
                } else if m2 & (1 << i) != 0 {
                    serves[i] = Serve::UavServed(UavId::Uav2);
                    centroids.push(i);
                }
            }
            for i in 0..n {
                if serves[i] != Serve::Unserved {
                    continue;
                }
                let relay = centroids
                    .iter()
                    .copied()
                    .filter(|&c| users[i].dist(users[c]) < params.d2d_range)
                    .min_by(|&a, &b| {
                        users[i].dist(users[a]).total_cmp(&users[i].dist(users[b])).then(a.cmp(&b))
                    });
                if let Some(c) = relay {
                    serves[i] = Serve::D2dServed(c);
                }
            }

            let assoc = Association { serves };
            let obj = objective(&placement, &assoc, scenario);
            let better = match &best {
                None => true,
                Some((b_obj, _, b_serves)) => {
                    obj > *b_obj || (obj == *b_obj && assoc.serves < *b_serves)
                }
            };
            if better {
                best = Some((obj, placement, assoc.serves));
            }
        }
    }

    let (obj, placement, serves) =
        best.expect("the empty assignment is always feasible");
    let cand = evaluate(&placement, Association { serves }, scenario);
    debug_assert!(cand.feasible, "enumeration only keeps feasible assignments");
    let trace = vec![TraceEntry {
        iteration: 0,
        objective: obj,
        best_objective: obj,
        placement,
        feasible: cand.feasible,
    }];
    Ok(finish(cand, scenario, trace))
}
