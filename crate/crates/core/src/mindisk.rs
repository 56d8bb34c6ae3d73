//! Smallest enclosing disk (SED) of a planar point set.
//!
//! The solver is the randomized incremental construction: scan a shuffled
//! copy of the points, and whenever a point falls outside the disk built so
//! far, rebuild the disk with that point pinned to the boundary (then with
//! two pinned points, where the answer is a direct circumcircle scan). The
//! construction is iterative throughout — no recursion — and runs in
//! expected linear time over the shuffle. The SED itself is unique, so the
//! generator only influences runtime, never the result.
//!
//! [`brute_force_sed`] is the O(n⁴) oracle used to cross-check the solver:
//! the minimum disk is always determined by two or three input points, so
//! trying every pair diameter and every triple circumcircle and keeping the
//! smallest disk that contains the whole set is exact.

use serde::{Deserialize, Serialize};

use crate::model::Point2;
use crate::rng::SeededRng;
use crate::Error;

/// Containment slack, relative to the disk scale: geometric predicates
/// accept points within `radius + CONTAINS_SLACK·(1 + radius)` so that
/// boundary points survive floating-point rounding. Well below the 1e-9
/// agreement tolerance the solver is tested against.
const CONTAINS_SLACK: f64 = 1e-10;

/// A closed disk on the ground plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    /// Whether `p` lies inside or on the boundary, with rounding slack.
    pub fn contains(&self, p: Point2) -> bool {
        self.center.dist(p) <= self.radius + CONTAINS_SLACK * (1.0 + self.radius)
    }
}

/// The smallest disk through two points: centered at their midpoint with the
/// half-distance as radius.
pub fn disk_from_two(p: Point2, q: Point2) -> Disk {
    let center = Point2::new(0.5 * (p.x + q.x), 0.5 * (p.y + q.y));
    // max() guards the asymmetric rounding of the two half-distances.
    let radius = center.dist(p).max(center.dist(q));
    Disk { center, radius }
}

/// The circumcircle of three points; for collinear or coincident inputs it
/// falls back to the smallest disk through the most distant pair (which then
/// contains the third point).
pub fn disk_from_three(p: Point2, q: Point2, r: Point2) -> Disk {
    if let Some(disk) = circumcircle(p, q, r) {
        return disk;
    }
    let pairs = [(p, q), (p, r), (q, r)];
    let widest = pairs
        .into_iter()
        .max_by(|(a1, b1), (a2, b2)| a1.dist_sq(*b1).total_cmp(&a2.dist_sq(*b2)))
        .expect("three candidate pairs");
    disk_from_two(widest.0, widest.1)
}

/// Circumcircle through three non-collinear points. Coordinates are
/// translated to the triangle's bounding-box midpoint before solving, which
/// keeps the determinant well conditioned for far-from-origin inputs and
/// makes exactly collinear triples cancel to a zero determinant.
fn circumcircle(p: Point2, q: Point2, r: Point2) -> Option<Disk> {
    let ox = 0.5 * (p.x.min(q.x).min(r.x) + p.x.max(q.x).max(r.x));
    let oy = 0.5 * (p.y.min(q.y).min(r.y) + p.y.max(q.y).max(r.y));
    let (ax, ay) = (p.x - ox, p.y - oy);
    let (bx, by) = (q.x - ox, q.y - oy);
    let (cx, cy) = (r.x - ox, r.y - oy);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if d == 0.0 {
        return None;
    }
    let x = ((ax * ax + ay * ay) * (by - cy)
        + (bx * bx + by * by) * (cy - ay)
        + (cx * cx + cy * cy) * (ay - by))
        / d;
    let y = ((ax * ax + ay * ay) * (cx - bx)
        + (bx * bx + by * by) * (ax - cx)
        + (cx * cx + cy * cy) * (bx - ax))
        / d;
    let center = Point2::new(ox + x, oy + y);
    let radius = center.dist(p).max(center.dist(q)).max(center.dist(r));
    Some(Disk { center, radius })
}

/// Signed cross product (q − p) × (r − p): positive when r lies left of the
/// directed line p→q.
fn cross(p: Point2, q: Point2, r: Point2) -> f64 {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

/// The unique minimum-radius disk containing every input point.
///
/// Expected linear time in the number of points; the generator supplies the
/// random scan order and has no effect on the returned disk.
pub fn smallest_enclosing_disk(points: &[Point2], rng: &mut SeededRng) -> Result<Disk, Error> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut pts = points.to_vec();
    rng.shuffle(&mut pts);

    let mut disk = Disk { center: pts[0], radius: 0.0 };
    for i in 1..pts.len() {
        if !disk.contains(pts[i]) {
            disk = with_one_boundary_point(&pts[..=i], pts[i]);
        }
    }
    Ok(disk)
}

/// Smallest disk containing `pts` with `p` pinned to the boundary
/// (`p` is the last element of `pts`).
fn with_one_boundary_point(pts: &[Point2], p: Point2) -> Disk {
    let mut disk = Disk { center: p, radius: 0.0 };
    for (i, &q) in pts.iter().enumerate() {
        if !disk.contains(q) {
            disk = if disk.radius == 0.0 {
                disk_from_two(p, q)
            } else {
                with_two_boundary_points(&pts[..=i], p, q)
            };
        }
    }
    disk
}

/// Smallest disk containing `pts` with both `p` and `q` on the boundary.
///
/// Every candidate is either the p–q diameter disk or a circumcircle through
/// p, q, and one point outside that disk. Candidates are tracked separately
/// for each side of the line p→q: on each side the admissible circumcenter
/// is the one pushed farthest toward that side, and of the two finalists the
/// smaller disk wins.
fn with_two_boundary_points(pts: &[Point2], p: Point2, q: Point2) -> Disk {
    let circ = disk_from_two(p, q);
    let mut left: Option<Disk> = None;
    let mut right: Option<Disk> = None;

    for &r in pts {
        if circ.contains(r) {
            continue;
        }
        let side = cross(p, q, r);
        let Some(c) = circumcircle(p, q, r) else {
            continue;
        };
        let center_side = cross(p, q, c.center);
        if side > 0.0 {
            if left.as_ref().is_none_or(|l| center_side > cross(p, q, l.center)) {
                left = Some(c);
            }
        } else if side < 0.0 {
            if right.as_ref().is_none_or(|r_| center_side < cross(p, q, r_.center)) {
                right = Some(c);
            }
        }
    }

    match (left, right) {
        (None, None) => circ,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

/// Exact O(n⁴) oracle: the smallest of all pair-diameter and triple-
/// circumcircle disks that contain the whole set. Same contract as
/// [`smallest_enclosing_disk`]; intended for small inputs (≲ 50 points).
pub fn brute_force_sed(points: &[Point2]) -> Result<Disk, Error> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if points.len() == 1 {
        return Ok(Disk { center: points[0], radius: 0.0 });
    }

    let contains_all = |d: &Disk| points.iter().all(|&p| d.contains(p));
    let mut best: Option<Disk> = None;
    let mut consider = |d: Disk| {
        if contains_all(&d) && best.as_ref().is_none_or(|b| d.radius < b.radius) {
            best = Some(d);
        }
    };

    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            consider(disk_from_two(points[i], points[j]));
            for k in (j + 1)..points.len() {
                if let Some(d) = circumcircle(points[i], points[j], points[k]) {
                    consider(d);
                }
            }
        }
    }
    Ok(best.expect("some pair or triple determines the enclosing disk"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_disk(d: Disk, cx: f64, cy: f64, r: f64) {
        assert!(
            (d.center.x - cx).abs() <= 1e-9
                && (d.center.y - cy).abs() <= 1e-9
                && (d.radius - r).abs() <= 1e-9,
            "expected center ({cx}, {cy}) radius {r}, got center {} radius {}",
            d.center,
            d.radius
        );
    }

    #[test]
    fn disk_from_two_takes_midpoint_and_half_distance() {
        assert_disk(disk_from_two(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)), 1.0, 0.0, 1.0);
        assert_disk(disk_from_two(Point2::new(0.0, 0.0), Point2::new(0.0, 0.0)), 0.0, 0.0, 0.0);
        // ‖(3,4)‖/2 = 2.5
        assert_disk(disk_from_two(Point2::new(1.0, 1.0), Point2::new(4.0, 5.0)), 2.5, 3.0, 2.5);
    }

    #[test]
    fn disk_from_three_circumcircle() {
        let d = disk_from_three(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(1.0, 1.0));
        assert_disk(d, 1.0, 0.0, 1.0);
        // Right triangle: hypotenuse is the diameter.
        let d = disk_from_three(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0));
        assert_disk(d, 0.5, 0.5, std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn disk_from_three_degenerate_falls_back_to_extreme_pair() {
        let d = disk_from_three(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0));
        assert_disk(d, 1.0, 0.0, 1.0);
        // Two coincident points.
        let d = disk_from_three(Point2::new(0.0, 0.0), Point2::new(0.0, 0.0), Point2::new(4.0, 0.0));
        assert_disk(d, 2.0, 0.0, 2.0);
        // Off-axis collinear set.
        let d = disk_from_three(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(3.0, 3.0));
        assert_disk(d, 1.5, 1.5, 1.5 * std::f64::consts::SQRT_2);
    }

    #[test]
    fn sed_handles_the_small_cases() {
        let mut rng = SeededRng::new(1);
        let d = smallest_enclosing_disk(&[Point2::new(3.0, 4.0)], &mut rng).unwrap();
        assert_disk(d, 3.0, 4.0, 0.0);

        let pts = [Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(1.0, 1.0)];
        let d = smallest_enclosing_disk(&pts, &mut rng).unwrap();
        assert_disk(d, 1.0, 0.0, 1.0);
    }

    #[test]
    fn sed_rejects_empty_input() {
        let mut rng = SeededRng::new(1);
        assert!(matches!(
            smallest_enclosing_disk(&[], &mut rng),
            Err(Error::EmptyPointSet)
        ));
        assert!(matches!(brute_force_sed(&[]), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn brute_force_on_unit_square() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let d = brute_force_sed(&pts).unwrap();
        assert_disk(d, 0.5, 0.5, std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn solver_matches_oracle_on_a_random_dozen() {
        let mut rng = SeededRng::new(99);
        let pts: Vec<Point2> = (0..12)
            .map(|_| Point2::new(rng.uniform(0.0, 200.0), rng.uniform(0.0, 200.0)))
            .collect();
        let fast = smallest_enclosing_disk(&pts, &mut rng).unwrap();
        let slow = brute_force_sed(&pts).unwrap();
        assert!(
            fast.center.dist(slow.center) <= 1e-9 && (fast.radius - slow.radius).abs() <= 1e-9,
            "solver {fast:?} vs oracle {slow:?}"
        );
    }

    #[test]
    fn coincident_points_collapse_to_zero_radius() {
        let pts = vec![Point2::new(5.0, 5.0); 9];
        let mut rng = SeededRng::new(2);
        let d = smallest_enclosing_disk(&pts, &mut rng).unwrap();
        assert_disk(d, 5.0, 5.0, 0.0);
    }
}
