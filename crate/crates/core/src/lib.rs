//! Planning toolkit for a two-tier UAV-assisted visible-light-communication
//! (VLC) network.
//!
//! Two UAVs hover at a fixed altitude over a rectangular ground area and act
//! as LED base stations. Each UAV serves up to `K` centroid users over VLC
//! downlinks; centroids relay content to nearby users over short-range D2D
//! links. The toolkit jointly optimizes the user association and the 2-D UAV
//! positions to maximize a weighted sum of UAV-served user rate and
//! D2D-served user count, subject to illumination, capacity, and distance
//! constraints.
//!
//! Module map:
//! - [`model`] — domain types and the closed-form VLC link budget
//!   (Lambertian emission, optical concentrator gain, channel gain,
//!   illuminance, achievable rate, coverage radius).
//! - [`rng`] — a seeded, stream-stable random number generator shared by all
//!   randomized steps; identical seeds give identical results everywhere.
//! - [`mindisk`] — smallest enclosing disk of a planar point set
//!   (randomized incremental construction) plus a brute-force oracle.
//! - [`assoc`] — cluster-based user association: center initialization,
//!   nearest-center labeling, UAV-to-cluster assignment, and exhaustive
//!   per-cluster center reselection.
//! - [`plan`] — the outer alternating optimization, the constraint checker,
//!   the small-instance exhaustive oracle, and the fixed-placement baseline.

pub mod assoc;
pub mod mindisk;
pub mod model;
pub mod plan;
pub mod rng;

pub use assoc::{Association, ClusterState, Serve};
pub use mindisk::Disk;
pub use model::{NetworkParams, Placement, Point2, Scenario, UavId};
pub use plan::{PlanResult, PlannerConfig, TraceEntry, Violation, ViolationReport};
pub use rng::SeededRng;

/// Domain errors surfaced by the library.
///
/// Contract violations that indicate a programming bug (e.g. feeding an
/// association of the wrong length into a rate sum) panic instead; only
/// conditions a caller can plausibly hit with externally supplied data are
/// represented here.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: String,
    },
    /// A geometric operation received no points.
    #[error("point set is empty")]
    EmptyPointSet,
    /// A scenario with zero users was passed where at least one is required.
    #[error("scenario has no users")]
    EmptyScenario,
    /// The exhaustive solver's search-space guard tripped.
    #[error(
        "instance too large for exhaustive search: {users} users (max {max_users}), \
         capacity {capacity} (max {max_capacity})"
    )]
    InstanceTooLarge {
        users: usize,
        max_users: usize,
        capacity: usize,
        max_capacity: usize,
    },
}
