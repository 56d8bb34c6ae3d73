//! Domain types and the closed-form VLC link budget.
//!
//! The downlink from a UAV-mounted LED to a ground user is a line-of-sight
//! Lambertian channel. With the transmitter pointing straight down and the
//! receiver facing straight up, the radiance angle equals the incidence
//! angle Ψ and cos Ψ = z_u / d, where d is the 3-D transmitter–receiver
//! distance. The quantities computed here:
//!
//! - Lambertian order        m = −ln 2 / ln(cos Φ½)
//! - concentrator gain       g = n_r² / sin² Ψ_c         (0 outside the FoV)
//! - channel gain            h = (m+1)·A / (2π d²) · g · (z_u/d)^{m+1}
//! - illuminance             η = ζ · p_u · h              (lux)
//! - achievable rate         R = ½ log₂(1 + (e/2π) (ζ p_u h / σ_w)²)
//! - coverage limit          d_max = min((p_u/V)^{1/(m+3)}, z_u / cos Ψ_c)
//!   with V = 2π η_th / ((m+1) A g z_u^{m+1} ζ)
//!
//! All functions are pure; parameter structs are plain data validated once
//! at the construction boundary.

use serde::{Deserialize, Serialize};

use crate::assoc::{Association, Serve};
use crate::Error;

/// A horizontal position on the ground plane, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist_sq(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Euclidean distance to `other`.
    pub fn dist(self, other: Point2) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::fmt::Display for Point2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Identifier of one of the two UAVs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UavId {
    Uav1,
    Uav2,
}

impl UavId {
    pub const BOTH: [UavId; 2] = [UavId::Uav1, UavId::Uav2];

    /// Zero-based index, for storage in fixed-size pairs.
    pub fn index(self) -> usize {
        match self {
            UavId::Uav1 => 0,
            UavId::Uav2 => 1,
        }
    }
}

impl std::fmt::Display for UavId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UavId::Uav1 => write!(f, "uav1"),
            UavId::Uav2 => write!(f, "uav2"),
        }
    }
}

/// Horizontal positions of both UAVs; the altitude is `NetworkParams::uav_height`
/// for both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub uav1: Point2,
    pub uav2: Point2,
}

impl Placement {
    pub fn new(uav1: Point2, uav2: Point2) -> Self {
        Placement { uav1, uav2 }
    }

    /// Both UAVs parked at the area corner (0,0) — the initial deployment.
    pub fn corner() -> Self {
        Placement::new(Point2::new(0.0, 0.0), Point2::new(0.0, 0.0))
    }

    pub fn position(&self, id: UavId) -> Point2 {
        match id {
            UavId::Uav1 => self.uav1,
            UavId::Uav2 => self.uav2,
        }
    }

    pub fn set_position(&mut self, id: UavId, p: Point2) {
        match id {
            UavId::Uav1 => self.uav1 = p,
            UavId::Uav2 => self.uav2 = p,
        }
    }
}

/// All physical and model constants, plus the objective weights and the
/// per-UAV capacity.
///
/// Angles are radians everywhere, including serialized form. The default
/// value set is the reference system of the evaluation setup: a 200 m ×
/// 200 m area, z_u = 100 m, p_u = 200 kW, ζ = 1, σ_w = 0.1 (noise power
/// 0.01 W under the power-equals-variance convention), A = 10 m²,
/// n_r = 1.5, Φ½ = Ψ_c = 60°, η_th = 0.4 lux, d_D2D = 10 m, K = 8,
/// weights a = 2/3 and b = 1/3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Ground-area width, meters. Users occupy [0, area_width] × [0, area_height].
    pub area_width: f64,
    /// Ground-area height, meters.
    pub area_height: f64,
    /// UAV altitude z_u, meters (fixed, identical for both UAVs).
    pub uav_height: f64,
    /// LED transmit power p_u, watts.
    pub led_power: f64,
    /// Dimming factor ζ in (0, 1].
    pub dimming: f64,
    /// Noise amplitude σ_w, same unit as ζ·p_u·h.
    pub noise_sigma: f64,
    /// Photodetector area A, m².
    pub detector_area: f64,
    /// Concentrator refractive index n_r (> 1).
    pub refractive_index: f64,
    /// LED half-power semi-angle Φ½, radians in (0, π/2).
    pub half_power_angle: f64,
    /// Receiver field-of-view semi-angle Ψ_c, radians in (0, π/2).
    pub fov_half_angle: f64,
    /// Illumination threshold η_th, lux.
    pub illum_threshold: f64,
    /// Maximum reliable D2D range d_D2D, meters (links require strictly less).
    pub d2d_range: f64,
    /// Per-UAV capacity K: maximum number of directly served (centroid) users.
    pub capacity: usize,
    /// Objective weight a on the UAV-served sum rate.
    pub weight_rate: f64,
    /// Objective weight b on the D2D-served user count; a + b = 1.
    pub weight_d2d: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            area_width: 200.0,
            area_height: 200.0,
            uav_height: 100.0,
            led_power: 2e5,
            dimming: 1.0,
            noise_sigma: 0.1,
            detector_area: 10.0,
            refractive_index: 1.5,
            half_power_angle: 60f64.to_radians(),
            fov_half_angle: 60f64.to_radians(),
            illum_threshold: 0.4,
            d2d_range: 10.0,
            capacity: 8,
            weight_rate: 2.0 / 3.0,
            weight_d2d: 1.0 / 3.0,
        }
    }
}

/// Tolerance on the weight-sum invariant a + b = 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

impl NetworkParams {
    /// Checks every type invariant; returns the first offending field.
    pub fn validate(&self) -> Result<(), Error> {
        fn positive(name: &'static str, v: f64) -> Result<(), Error> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be strictly positive and finite, got {v}"),
                })
            }
        }
        positive("area_width", self.area_width)?;
        positive("area_height", self.area_height)?;
        positive("uav_height", self.uav_height)?;
        positive("led_power", self.led_power)?;
        positive("noise_sigma", self.noise_sigma)?;
        positive("detector_area", self.detector_area)?;
        positive("illum_threshold", self.illum_threshold)?;
        positive("d2d_range", self.d2d_range)?;
        if !(self.dimming > 0.0 && self.dimming <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "dimming",
                reason: format!("must lie in (0, 1], got {}", self.dimming),
            });
        }
        if !(self.refractive_index.is_finite() && self.refractive_index > 1.0) {
            return Err(Error::InvalidParameter {
                name: "refractive_index",
                reason: format!("must be > 1, got {}", self.refractive_index),
            });
        }
        for (name, angle) in [
            ("half_power_angle", self.half_power_angle),
            ("fov_half_angle", self.fov_half_angle),
        ] {
            if !(angle > 0.0 && angle < std::f64::consts::FRAC_PI_2) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must lie strictly inside (0, pi/2) rad, got {angle}"),
                });
            }
        }
        if self.capacity == 0 {
            return Err(Error::InvalidParameter {
                name: "capacity",
                reason: "must be at least 1".to_string(),
            });
        }
        for (name, w) in [
            ("weight_rate", self.weight_rate),
            ("weight_d2d", self.weight_d2d),
        ] {
            if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must lie in [0, 1], got {w}"),
                });
            }
        }
        if (self.weight_rate + self.weight_d2d - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "weight_rate",
                reason: format!(
                    "weights must satisfy a + b = 1 within {WEIGHT_SUM_TOLERANCE}, got a = {}, b = {}",
                    self.weight_rate, self.weight_d2d
                ),
            });
        }
        Ok(())
    }

    /// Lambertian order m of the LED; panics only if the params are invalid.
    pub fn lambertian_order(&self) -> f64 {
        lambertian_order(self.half_power_angle)
            .expect("half_power_angle validated inside (0, pi/2)")
    }

    /// Optical concentrator gain at incidence angle `psi_in` (radians, ≥ 0):
    /// n_r²/sin²Ψ_c strictly inside the FoV, 0 at and beyond it.
    pub fn optical_gain(&self, psi_in: f64) -> f64 {
        debug_assert!(psi_in >= 0.0, "incidence angle must be non-negative");
        if psi_in < self.fov_half_angle {
            let s = self.fov_half_angle.sin();
            self.refractive_index * self.refractive_index / (s * s)
        } else {
            0.0
        }
    }

    /// 3-D distance between a UAV hovering at `uav` and a ground user at `user`.
    pub fn link_distance(&self, uav: Point2, user: Point2) -> f64 {
        (uav.dist_sq(user) + self.uav_height * self.uav_height).sqrt()
    }

    /// Lambertian LOS channel gain h between a UAV at horizontal position
    /// `uav` and a user at `user`. Zero at and beyond the FoV cutoff.
    pub fn channel_gain(&self, uav: Point2, user: Point2) -> f64 {
        let d = self.link_distance(uav, user);
        let cos_psi = self.uav_height / d;
        // Ψ ≥ Ψ_c  ⇔  cos Ψ ≤ cos Ψ_c on (0, π/2); the boundary itself is
        // treated as out of view.
        if cos_psi <= self.fov_half_angle.cos() {
            return 0.0;
        }
        let m = self.lambertian_order();
        let g = self.optical_gain(cos_psi.acos());
        (m + 1.0) * self.detector_area / (2.0 * std::f64::consts::PI * d * d)
            * g
            * cos_psi.powf(m + 1.0)
    }

    /// Illuminance η = ζ·p_u·h in lux delivered through channel gain `h`.
    pub fn illuminance(&self, h: f64) -> f64 {
        debug_assert!(h >= 0.0, "channel gain must be non-negative");
        self.dimming * self.led_power * h
    }

    /// Achievable downlink rate in bps/Hz through channel gain `h`:
    /// R = ½ log₂(1 + (e/2π)·(ζ p_u h / σ_w)²).
    pub fn link_rate(&self, h: f64) -> f64 {
        debug_assert!(h >= 0.0, "channel gain must be non-negative");
        let snr_amplitude = self.dimming * self.led_power * h / self.noise_sigma;
        let e_over_2pi = std::f64::consts::E / std::f64::consts::TAU;
        0.5 * (1.0 + e_over_2pi * snr_amplitude * snr_amplitude).log2()
    }

    /// Maximum 3-D link distance at which a user can be served: the
    /// illumination bound (p_u/V)^{1/(m+3)} intersected with the FoV cutoff
    /// z_u/cos Ψ_c beyond which the gain is identically zero.
    pub fn coverage_distance_limit(&self) -> f64 {
        let (illum_bound, fov_bound) = self.coverage_bounds();
        illum_bound.min(fov_bound)
    }

    /// (illumination bound, FoV cutoff) — the two pieces of
    /// [`coverage_distance_limit`](Self::coverage_distance_limit).
    pub fn coverage_bounds(&self) -> (f64, f64) {
        let m = self.lambertian_order();
        let g = self.optical_gain(0.0);
        let v = 2.0 * std::f64::consts::PI * self.illum_threshold
            / ((m + 1.0) * self.detector_area * g * self.uav_height.powf(m + 1.0) * self.dimming);
        let illum_bound = (self.led_power / v).powf(1.0 / (m + 3.0));
        let fov_bound = self.uav_height / self.fov_half_angle.cos();
        (illum_bound, fov_bound)
    }

    /// Whether a UAV at `uav` delivers at least the threshold illuminance to
    /// `user`. This is the exact serving-feasibility predicate (constraint
    /// η ≥ η_th); every feasibility gate in the toolkit uses it so that
    /// planner output and constraint checker can never disagree.
    pub fn covers(&self, uav: Point2, user: Point2) -> bool {
        self.illuminance(self.channel_gain(uav, user)) >= self.illum_threshold
    }
}

/// Lambertian order m = −ln 2 / ln(cos Φ½) for a half-power semi-angle in
/// (0, π/2) radians.
pub fn lambertian_order(half_power_angle: f64) -> Result<f64, Error> {
    if !(half_power_angle > 0.0 && half_power_angle < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter {
            name: "half_power_angle",
            reason: format!(
                "must lie strictly inside (0, pi/2) rad, got {half_power_angle}"
            ),
        });
    }
    Ok(-std::f64::consts::LN_2 / half_power_angle.cos().ln())
}

/// The ground users, the parameters that govern them, and the seed the user
/// draw came from. The user index is the user id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub users: Vec<Point2>,
    pub params: NetworkParams,
    pub seed: u64,
}

impl Scenario {
    /// Validates the type invariants: valid params, at least one user, every
    /// user inside [0, area_width] × [0, area_height].
    pub fn new(users: Vec<Point2>, params: NetworkParams, seed: u64) -> Result<Self, Error> {
        params.validate()?;
        if users.is_empty() {
            return Err(Error::EmptyScenario);
        }
        for (n, u) in users.iter().enumerate() {
            let inside = u.is_finite()
                && (0.0..=params.area_width).contains(&u.x)
                && (0.0..=params.area_height).contains(&u.y);
            if !inside {
                return Err(Error::InvalidParameter {
                    name: "users",
                    reason: format!(
                        "user {n} at {u} lies outside [0, {}] x [0, {}]",
                        params.area_width, params.area_height
                    ),
                });
            }
        }
        Ok(Scenario { users, params, seed })
    }

    /// Number of users N.
    pub fn user_count(&self) -> usize {
        self.users.len()
    }
}

/// Total UAV-downlink rate of an association: the sum of `link_rate` over
/// users served by UAV 1 plus those served by UAV 2. D2D and unserved users
/// contribute nothing.
///
/// # Panics
/// If the association does not cover exactly the scenario's users (a
/// contract violation by the caller).
pub fn sum_rate(placement: &Placement, association: &Association, scenario: &Scenario) -> f64 {
    assert_eq!(
        association.serves.len(),
        scenario.users.len(),
        "association must cover exactly the scenario's users"
    );
    let params = &scenario.params;
    association
        .serves
        .iter()
        .zip(&scenario.users)
        .map(|(tag, &user)| match tag {
            Serve::UavServed(id) => {
                params.link_rate(params.channel_gain(placement.position(*id), user))
            }
            Serve::D2dServed(_) | Serve::Unserved => 0.0,
        })
        .sum()
}
