//! The annular billiard map.
//!
//! Explicit maps between the two walls (written once over [`Real`] so they can
//! run on `f64`, double-double and Taylor jets), the mirror symmetry, and a
//! Cartesian ray-circle stepper that serves as an independent oracle.
//!
//! Conventions. On the outer unit circle `s` is the polar angle in `[-π, π)`.
//! On the scatterer `s = π + R(π - γ)` with `γ ∈ [0, 2π)` the polar angle
//! about its centre, so `s` runs clockwise. `θ ∈ (0, π)` is measured from the
//! positively oriented tangent to the outgoing velocity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{BilliardError, Result};
use crate::geometry::ScattererPose;
use crate::real::{wrap_from, Real};

/// Slack allowed on arccos arguments before a no-collision error.
pub const ACOS_TOL: f64 = 1e-10;
/// Intersections closer than this are the wall the ray leaves from.
pub const MIN_FLIGHT: f64 = 1e-12;
/// Discriminants below this count as tangential and are ignored.
pub const GRAZING_DISCRIMINANT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub wall: Wall,
    pub s: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffCoords {
    pub s: f64,
    pub r: f64,
}

impl PhasePoint {
    pub fn outer(s: f64, theta: f64) -> Self {
        Self { wall: Wall::Outer, s: wrap_from(s, -PI), theta }
    }

    pub fn inner(s: f64, theta: f64) -> Self {
        Self { wall: Wall::Inner, s, theta }
    }

    pub fn to_birkhoff(&self) -> BirkhoffCoords {
        BirkhoffCoords { s: self.s, r: self.theta.cos() }
    }

    pub fn from_birkhoff(wall: Wall, b: BirkhoffCoords) -> Result<Self> {
        if !(b.r.abs() < 1.0) {
            return Err(BilliardError::Domain(format!("|r| must be below 1, got {}", b.r)));
        }
        Ok(Self { wall, s: b.s, theta: b.r.acos() })
    }

    /// Componentwise distance, with outer arc lengths compared on the circle.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        let ds = match self.wall {
            Wall::Outer => wrap_from(self.s - other.s, -PI).abs(),
            Wall::Inner => (self.s - other.s).abs(),
        };
        let wall_gap = if self.wall == other.wall { 0.0 } else { f64::INFINITY };
        ds.max((self.theta - other.theta).abs()) + wall_gap
    }
}

/// Scatterer with centre `(cx, cy)` and radius `radius` in a generic scalar.
#[derive(Debug, Clone, Copy)]
pub struct Disk<S> {
    pub cx: S,
    pub cy: S,
    pub radius: S,
}

impl From<&ScattererPose> for Disk<f64> {
    fn from(p: &ScattererPose) -> Self {
        Self { cx: p.center[0], cy: p.center[1], radius: p.radius }
    }
}

fn checked_acos<S: Real>(arg: S) -> Result<S> {
    let v = arg.value();
    if v.abs() > 1.0 + ACOS_TOL || v.is_nan() {
        return Err(BilliardError::NoCollision { argument: v });
    }
    if v.abs() > 1.0 {
        return Ok(S::from_f64(v.signum()).acos());
    }
    Ok(arg.acos())
}

/// `bounces` reflections in the bare unit circle: `(s + 2·bounces·θ, θ)`.
pub fn disk_step<S: Real>(s: S, theta: S, bounces: u32) -> (S, S) {
    (wrap_from(s + theta * (2.0 * bounces as f64), -PI), theta)
}

/// Outer wall to scatterer.
pub fn in_step<S: Real>(s: S, theta: S, disk: &Disk<S>) -> Result<(S, S)> {
    let phase = s + theta;
    let arg = (disk.cx * phase.cos() + disk.cy * phase.sin() - theta.cos()) / disk.radius;
    let theta_n = checked_acos(arg)?;
    let gamma = wrap_from(phase + theta_n + S::pi(), 0.0);
    Ok(((S::pi() - gamma) * disk.radius + S::pi(), theta_n))
}

/// Scatterer to outer wall.
pub fn out_step<S: Real>(s: S, theta: S, disk: &Disk<S>) -> Result<(S, S)> {
    let turn = (s - S::pi()) / disk.radius;
    let gamma = S::pi() - turn;
    let phase = gamma + theta;
    let arg = -(disk.cx * phase.cos()) - disk.cy * phase.sin() - disk.radius * theta.cos();
    let theta1 = checked_acos(arg)?;
    Ok((wrap_from(theta + theta1 - turn, -PI), theta1))
}

fn require(p: &PhasePoint, wall: Wall) -> Result<()> {
    if p.wall != wall {
        return Err(BilliardError::Domain(format!("expected a point on the {wall:?} wall, got {:?}", p.wall)));
    }
    Ok(())
}

pub fn map_disk(p: &PhasePoint, bounces: u32) -> Result<PhasePoint> {
    require(p, Wall::Outer)?;
    let (s, theta) = disk_step(p.s, p.theta, bounces);
    Ok(PhasePoint::outer(s, theta))
}

pub fn map_in(p: &PhasePoint, pose: &ScattererPose) -> Result<PhasePoint> {
    require(p, Wall::Outer)?;
    let (s, theta) = in_step(p.s, p.theta, &Disk::from(pose))?;
    Ok(PhasePoint::inner(s, theta))
}

pub fn map_out(p: &PhasePoint, pose: &ScattererPose) -> Result<PhasePoint> {
    require(p, Wall::Inner)?;
    let (s, theta) = out_step(p.s, p.theta, &Disk::from(pose))?;
    Ok(PhasePoint::outer(s, theta))
}

/// Mirror image in the x-axis: `(-s, π - θ)`, i.e. `(-s, -r)` in Birkhoff
/// coordinates. Inner arc lengths are mirrored about `s = π`.
pub fn reflection(p: &PhasePoint) -> PhasePoint {
    match p.wall {
        Wall::Outer => PhasePoint::outer(-p.s, PI - p.theta),
        Wall::Inner => PhasePoint::inner(2.0 * PI - p.s, PI - p.theta),
    }
}

/// Mirror map on `(s, r)` pairs of the outer wall, generic over the scalar.
pub fn reflection_sr<S: Real>(s: S, r: S) -> (S, S) {
    (wrap_from(-s, -PI), -r)
}

/// Position and unit velocity of a phase point in the plane.
pub fn cartesian(p: &PhasePoint, pose: &ScattererPose) -> ([f64; 2], [f64; 2]) {
    match p.wall {
        Wall::Outer => {
            let psi = p.s + PI / 2.0 + p.theta;
            ([p.s.cos(), p.s.sin()], [psi.cos(), psi.sin()])
        }
        Wall::Inner => {
            let gamma = PI - (p.s - PI) / pose.radius;
            let psi = gamma - PI / 2.0 + p.theta;
            (
                [pose.center[0] + pose.radius * gamma.cos(), pose.center[1] + pose.radius * gamma.sin()],
                [psi.cos(), psi.sin()],
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub point: PhasePoint,
    pub flight: f64,
    /// A tangential scatterer intersection was seen and skipped.
    pub grazing: bool,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// One collision of the full annular billiard by ray casting.
pub fn generic_step(p: &PhasePoint, pose: &ScattererPose) -> Result<Step> {
    if !(p.theta > 0.0 && p.theta < PI) {
        return Err(BilliardError::Domain(format!("theta must lie in (0, pi), got {}", p.theta)));
    }
    let (pos, v) = cartesian(p, pose);

    // outer circle: the forward root of |pos + t v| = 1
    let b = dot(pos, v);
    let disc = b * b - (dot(pos, pos) - 1.0);
    let mut t_hit = -b + disc.max(0.0).sqrt();
    let mut wall = Wall::Outer;
    let mut grazing = false;

    let w = [pos[0] - pose.center[0], pos[1] - pose.center[1]];
    let b2 = dot(w, v);
    let disc2 = b2 * b2 - (dot(w, w) - pose.radius * pose.radius);
    if disc2 >= GRAZING_DISCRIMINANT {
        let t = -b2 - disc2.sqrt();
        if t > MIN_FLIGHT && t < t_hit {
            t_hit = t;
            wall = Wall::Inner;
        }
    } else if disc2 > 0.0 && -b2 > MIN_FLIGHT {
        grazing = true;
    }
    if !(t_hit > MIN_FLIGHT) {
        return Err(BilliardError::Domain(format!("ray does not re-enter the table (t = {t_hit})")));
    }

    let q = [pos[0] + t_hit * v[0], pos[1] + t_hit * v[1]];
    let point = match wall {
        Wall::Outer => {
            let s = wrap_from(q[1].atan2(q[0]), -PI);
            let n = [s.cos(), s.sin()];
            let vn = dot(v, n);
            let v1 = [v[0] - 2.0 * vn * n[0], v[1] - 2.0 * vn * n[1]];
            let tangent = [-n[1], n[0]];
            let theta = (-dot(v1, n)).atan2(dot(v1, tangent));
            PhasePoint { wall, s, theta }
        }
        Wall::Inner => {
            let gamma = wrap_from((q[1] - pose.center[1]).atan2(q[0] - pose.center[0]), 0.0);
            let u = [gamma.cos(), gamma.sin()];
            let vn = dot(v, u);
            let v1 = [v[0] - 2.0 * vn * u[0], v[1] - 2.0 * vn * u[1]];
            let tangent = [u[1], -u[0]];
            let theta = dot(v1, u).atan2(dot(v1, tangent));
            PhasePoint { wall, s: PI + pose.radius * (PI - gamma), theta }
        }
    };
    Ok(Step { point, flight: t_hit, grazing })
}

/// `count` consecutive oracle steps.
pub fn generic_iterate(p: &PhasePoint, pose: &ScattererPose, count: usize) -> Result<PhasePoint> {
    let mut q = *p;
    for _ in 0..count {
        q = generic_step(&q, pose)?.point;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TableParams;

    fn far_pose() -> ScattererPose {
        // tiny scatterer out of the way: effectively the bare disk
        ScattererPose { center: [0.0, -0.999], radius: 1e-6 }
    }

    #[test]
    fn disk_matches_ray_casting() {
        let p = PhasePoint::outer(0.3, 0.7);
        let a = map_disk(&p, 5).unwrap();
        let b = generic_iterate(&p, &far_pose(), 5).unwrap();
        assert!(a.distance(&b) < 1e-10, "{a:?} {b:?}");
        assert_eq!(map_disk(&p, 0).unwrap(), p);
        let n = 7;
        let q = map_disk(&PhasePoint::outer(0.1, PI / n as f64), n - 1).unwrap();
        let expect = PhasePoint::outer(0.1 + 2.0 * (n - 1) as f64 * PI / n as f64, PI / n as f64);
        assert!(q.distance(&expect) < 1e-14);
    }

    #[test]
    fn symmetric_chord_hits_normally() {
        let params = TableParams::type_a(5, 1, 0.1, 0.0).unwrap();
        let pose = crate::geometry::scatterer_pose(&params).unwrap();
        let th = PI / 5.0;
        let last = PhasePoint::outer(PI - th, th);
        let hit = map_in(&last, &pose).unwrap();
        assert!((hit.theta - PI / 2.0).abs() < 1e-12);
        let back = map_out(&hit, &pose).unwrap();
        // the particle retraces the chord
        assert!(back.distance(&PhasePoint::outer(PI - th, PI - th)) < 1e-12, "{back:?}");
    }

    #[test]
    fn explicit_maps_match_oracle() {
        let params = TableParams::type_b(3, 0.01).unwrap();
        let pose = crate::geometry::scatterer_pose(&params).unwrap();
        let th = PI / 3.0 + 0.01;
        let s = PI - PI / 3.0 + 0.02;
        for (ds, dt) in [(0.0, 0.0), (0.01, -0.02), (-0.03, 0.01)] {
            let p = PhasePoint::outer(s + ds, th + dt);
            let a = map_in(&p, &pose).unwrap();
            let b = generic_step(&p, &pose).unwrap().point;
            assert!(a.distance(&b) < 1e-10, "{a:?} {b:?}");
            let c = map_out(&a, &pose).unwrap();
            let d = generic_step(&a, &pose).unwrap().point;
            assert!(c.distance(&d) < 1e-10, "{c:?} {d:?}");
        }
    }

    #[test]
    fn missing_the_scatterer_is_an_error() {
        let params = TableParams::type_b(3, 0.01).unwrap();
        let pose = crate::geometry::scatterer_pose(&params).unwrap();
        assert!(matches!(
            map_in(&PhasePoint::outer(0.0, 0.2), &pose),
            Err(BilliardError::NoCollision { .. })
        ));
    }

    #[test]
    fn reflection_is_an_involution() {
        let p = PhasePoint::outer(0.4, 1.1);
        assert!(reflection(&reflection(&p)).distance(&p) < 1e-15);
        let fixed = PhasePoint::outer(0.0, PI / 2.0);
        assert_eq!(reflection(&fixed), fixed);
        let q = PhasePoint::inner(3.2, 0.9);
        assert!(reflection(&reflection(&q)).distance(&q) < 1e-15);
    }

    #[test]
    fn birkhoff_round_trip() {
        let p = PhasePoint::outer(1.0, PI / 2.0);
        assert!(p.to_birkhoff().r.abs() < 1e-16);
        let q = PhasePoint::from_birkhoff(Wall::Outer, p.to_birkhoff()).unwrap();
        assert!((q.theta - p.theta).abs() < 1e-15);
        assert!(PhasePoint::from_birkhoff(Wall::Outer, BirkhoffCoords { s: 0.0, r: 1.0 }).is_err());
    }
}
