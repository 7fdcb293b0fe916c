//! Table geometry: admissible scatterer radii, caustics and scatterer placement.
//!
//! Frame: the outer wall is the unit circle centred at the origin. The
//! scatterer sits on the chord joining the last outer collision before the
//! scatterer to the first outer collision of the orbit, which is the vertical
//! line `x = -cos(kπ/n)`; its centre is on the negative x-axis when `δ = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{BilliardError, Result};
use crate::real::Real;

/// Absolute tolerance for interiority and tangency comparisons.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Config {
    /// Polygonal orbit with a perpendicular scatterer hit on one chord.
    TypeA,
    /// Detuned orbit with the scatterer tangent to the outer circle.
    TypeB,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableParams {
    pub n: u32,
    pub k: u32,
    /// Scatterer radius `R`.
    pub radius: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub config: Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScattererPose {
    pub center: [f64; 2],
    pub radius: f64,
}

impl ScattererPose {
    /// `|center| + radius - 1`; zero for a tangent scatterer, negative inside.
    pub fn tangency_residual(&self) -> f64 {
        self.center[0].hypot(self.center[1]) + self.radius - 1.0
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 3 {
        return Err(BilliardError::Domain(format!("n must be at least 3, got {n}")));
    }
    Ok(())
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    check_n(n)?;
    if k == 0 || 2 * k > n {
        return Err(BilliardError::Domain(format!("need 1 <= k <= n/2, got n={n}, k={k}")));
    }
    if gcd(n, k) != 1 {
        return Err(BilliardError::Domain(format!("gcd(n, k) must be 1, got n={n}, k={k}")));
    }
    Ok(())
}

/// Radius of the scatterer that closes the regular n-gon chord and touches
/// the outer circle: `1 - cos(π/n)`.
pub fn tangency_radius_simple(n: u32) -> Result<f64> {
    check_n(n)?;
    Ok(1.0 - (PI / n as f64).cos())
}

/// Largest scatterer on the displaced `k = 1` chord that stays inside the disk.
pub fn max_radius_delta(n: u32, delta: f64) -> Result<f64> {
    check_n(n)?;
    let s = (PI / n as f64).sin();
    if !(0.0..s).contains(&delta) {
        return Err(BilliardError::Domain(format!(
            "delta must lie in [0, sin(pi/n)) = [0, {s}), got {delta}"
        )));
    }
    Ok(interior_radius(n, 1, delta))
}

/// `1 - sqrt(δ² + cos²(kπ/n))`, the interiority bound for any winding number.
pub fn interior_radius(n: u32, k: u32, delta: f64) -> f64 {
    let c = (k as f64 * PI / n as f64).cos();
    1.0 - delta.hypot(c)
}

/// `sin(2π/n)·(cos(kπ/n)·tan(π/n) - δ)`: the distance from the displaced
/// centre to the nearest other chord of the orbit. Valid for every `k`.
pub fn chord_clearance_radius(n: u32, k: u32, delta: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    (2.0 * PI / nf).sin() * ((kf * PI / nf).cos() * (PI / nf).tan() - delta)
}

/// Largest scatterer for a star orbit (`k >= 2`) that misses the other chords.
pub fn max_radius_star(n: u32, k: u32, delta: f64) -> Result<f64> {
    check_nk(n, k)?;
    if k < 2 || n < 5 {
        return Err(BilliardError::Domain(format!(
            "star orbits need n >= 5 and k >= 2, got n={n}, k={k}"
        )));
    }
    let bound = (k as f64 * PI / n as f64).cos() * (PI / n as f64).tan();
    if delta < 0.0 || delta > bound + GEOMETRY_TOL {
        return Err(BilliardError::Domain(format!(
            "delta must lie in [0, {bound}], got {delta}"
        )));
    }
    Ok(chord_clearance_radius(n, k, delta).max(0.0))
}

/// Radius of the caustic circle tangent to every chord of the `(n, k)` polygon.
pub fn caustic_radius(n: u32, k: u32) -> Result<f64> {
    check_nk(n, k)?;
    Ok((k as f64 * PI / n as f64).cos())
}

/// Distance `1 - R_b` from the origin to the centre of the tangent type-(b)
/// scatterer, `cos θ₀ / cos(nε)` with `θ₀ = π/n + ε`.
pub fn type_b_center_distance<S: Real>(n: u32, epsilon: f64) -> S {
    let theta0 = S::pi() / n as f64 + epsilon;
    theta0.cos() / (S::from_f64(epsilon) * n as f64).cos()
}

/// `R_b = 1 + cos θ₀ / cos(nθ₀)`, evaluated as
/// `2 sin((θ₀+nε)/2) sin((θ₀-nε)/2) / cos(nε)` to avoid cancellation.
pub fn tangency_radius_b_generic<S: Real>(n: u32, epsilon: f64) -> S {
    let theta0 = S::pi() / n as f64 + epsilon;
    let ne = S::from_f64(epsilon) * n as f64;
    ((theta0 + ne) * 0.5).sin() * ((theta0 - ne) * 0.5).sin() * 2.0 / ne.cos()
}

pub fn tangency_radius_b(n: u32, epsilon: f64) -> Result<f64> {
    check_n(n)?;
    if !epsilon.is_finite() {
        return Err(BilliardError::Domain(format!("epsilon must be finite, got {epsilon}")));
    }
    let cn = (n as f64 * epsilon).cos();
    if cn.abs() < GEOMETRY_TOL {
        return Err(BilliardError::Singular(format!("cos(n*theta0) vanishes at n={n}, eps={epsilon}")));
    }
    let r = tangency_radius_b_generic::<f64>(n, epsilon);
    if !(r > 0.0 && r < 1.0) {
        return Err(BilliardError::Singular(format!(
            "tangent radius {r} outside (0, 1) at n={n}, eps={epsilon}"
        )));
    }
    Ok(r)
}

/// Polar angles of the outer collisions `z_0 .. z_{n-1}` of the orbit family.
pub fn outer_angles(params: &TableParams) -> Vec<f64> {
    let (theta, s0) = initial_state(params);
    (0..params.n).map(|i| s0 + 2.0 * i as f64 * theta).collect()
}

/// `(θ₀, s₀)` of the first outer collision.
pub fn initial_state(params: &TableParams) -> (f64, f64) {
    let nf = params.n as f64;
    match params.config {
        Config::TypeA => {
            let theta = params.k as f64 * PI / nf;
            (theta, -PI + theta)
        }
        Config::TypeB => {
            let eps = params.epsilon;
            (PI / nf + eps, -PI + PI / nf + eps * (1.0 - nf))
        }
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Smallest distance from the scatterer centre to the outer-to-outer chords
/// `z_i z_{i+1}`, `i = 0 .. n-2`.
pub fn chord_clearance(params: &TableParams, pose: &ScattererPose) -> f64 {
    let pts: Vec<[f64; 2]> = outer_angles(params).iter().map(|s| [s.cos(), s.sin()]).collect();
    pts.windows(2)
        .map(|w| point_segment_distance(pose.center, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

impl TableParams {
    pub fn type_a(n: u32, k: u32, radius: f64, delta: f64) -> Result<Self> {
        let p = Self { n, k, radius, delta, epsilon: 0.0, config: Config::TypeA };
        p.validate()?;
        Ok(p)
    }

    /// The type-(b) table is fully determined by `(n, ε)`.
    pub fn type_b(n: u32, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(BilliardError::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        let radius = tangency_radius_b(n, epsilon)?;
        let p = Self { n, k: 1, radius, delta: 0.0, epsilon, config: Config::TypeB };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        fn invalid<T>(msg: String) -> Result<T> {
            Err(BilliardError::InvalidTable(msg))
        }
        check_nk(self.n, self.k).or_else(|e| invalid(e.to_string()))?;
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return invalid(format!("radius must lie in (0, 1), got {}", self.radius));
        }
        match self.config {
            Config::TypeA => {
                if !(self.delta >= 0.0) || self.epsilon != 0.0 {
                    return invalid(format!(
                        "type (a) needs delta >= 0 and epsilon = 0, got delta={}, eps={}",
                        self.delta, self.epsilon
                    ));
                }
                let inner = interior_radius(self.n, self.k, self.delta);
                if self.radius > inner + GEOMETRY_TOL {
                    return invalid(format!(
                        "radius {} exceeds interior bound {inner} (scatterer leaves the disk)",
                        self.radius
                    ));
                }
                let clear = chord_clearance_radius(self.n, self.k, self.delta);
                if self.radius > clear + GEOMETRY_TOL {
                    return invalid(format!(
                        "radius {} exceeds chord-clearance bound {clear}",
                        self.radius
                    ));
                }
            }
            Config::TypeB => {
                if self.k != 1 || self.delta != 0.0 || !(self.epsilon > 0.0) {
                    return invalid(format!(
                        "type (b) needs k = 1, delta = 0, epsilon > 0, got k={}, delta={}, eps={}",
                        self.k, self.delta, self.epsilon
                    ));
                }
                let rb = tangency_radius_b(self.n, self.epsilon)
                    .or_else(|e| invalid(e.to_string()))?;
                if (self.radius - rb).abs() > GEOMETRY_TOL {
                    return invalid(format!(
                        "type (b) radius must equal the tangency radius {rb}, got {}",
                        self.radius
                    ));
                }
            }
        }
        // the closed-form bounds are trusted only after a direct check
        let pose = self.pose_unchecked();
        let clearance = chord_clearance(self, &pose);
        if clearance < self.radius - GEOMETRY_TOL {
            return invalid(format!(
                "scatterer of radius {} cuts another chord (clearance {clearance})",
                self.radius
            ));
        }
        Ok(())
    }

    fn pose_unchecked(&self) -> ScattererPose {
        let center = match self.config {
            Config::TypeA => [-(self.k as f64 * PI / self.n as f64).cos(), self.delta],
            Config::TypeB => [-type_b_center_distance::<f64>(self.n, self.epsilon), 0.0],
        };
        ScattererPose { center, radius: self.radius }
    }

    /// True for the tangent `k = 1, δ = 0` configurations (cusp).
    pub fn is_tangent(&self) -> bool {
        match self.config {
            Config::TypeB => true,
            Config::TypeA => {
                self.k == 1
                    && self.delta == 0.0
                    && (self.radius - interior_radius(self.n, 1, 0.0)).abs() <= GEOMETRY_TOL
            }
        }
    }
}

pub fn scatterer_pose(params: &TableParams) -> Result<ScattererPose> {
    params.validate()?;
    Ok(params.pose_unchecked())
}
