//! The two periodic orbit families as explicit collision sequences.
//!
//! Indexing: `z_0 .. z_{n-1}` are outer collisions, `z_n` and `z_{2n+1}` the
//! perpendicular scatterer hits, and `z_{n+1} .. z_{2n}` retrace the outer
//! points in reverse. `flights[i]` is the distance from `z_i` to `z_{i+1}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{BilliardError, Result};
use crate::geometry::{initial_state, scatterer_pose, Config, ScattererPose, TableParams};
use crate::map::{cartesian, generic_step, PhasePoint, Wall};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub params: TableParams,
    pub pose: ScattererPose,
    pub points: Vec<PhasePoint>,
    pub flights: Vec<f64>,
    pub curvatures: Vec<f64>,
}

impl OrbitRecord {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// Collision positions in the plane, in orbit order.
    pub fn polyline(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| cartesian(p, &self.pose).0).collect()
    }
}

fn curvature(wall: Wall, radius: f64) -> f64 {
    match wall {
        Wall::Outer => -1.0,
        Wall::Inner => 1.0 / radius,
    }
}

/// Assemble the record from the outer angle `θ` and first position `s₀`.
/// `gamma_top` is the scatterer angle of the first perpendicular hit.
fn assemble(params: TableParams, pose: ScattererPose, theta: f64, s0: f64, gamma_top: f64) -> OrbitRecord {
    let n = params.n as usize;
    let radius = params.radius;
    let mut points = Vec::with_capacity(2 * n + 2);
    for i in 0..n {
        points.push(PhasePoint::outer(s0 + 2.0 * i as f64 * theta, theta));
    }
    let s_last = s0 + 2.0 * (n - 1) as f64 * theta;
    points.push(PhasePoint::inner(PI + radius * (PI - gamma_top), PI / 2.0));
    for j in 0..n {
        points.push(PhasePoint::outer(s_last - 2.0 * j as f64 * theta, PI - theta));
    }
    // mirror image of the first hit through the chord direction
    let gamma_bottom = 2.0 * PI - gamma_top;
    points.push(PhasePoint::inner(PI + radius * (PI - gamma_bottom), PI / 2.0));

    let xy: Vec<[f64; 2]> = points.iter().map(|p| cartesian(p, &pose).0).collect();
    let chord = 2.0 * theta.sin();
    let flights = (0..2 * n + 2)
        .map(|i| {
            let next = (i + 1) % (2 * n + 2);
            if points[i].wall == Wall::Outer && points[next].wall == Wall::Outer {
                chord
            } else {
                (xy[next][0] - xy[i][0]).hypot(xy[next][1] - xy[i][1])
            }
        })
        .collect();
    let curvatures = points.iter().map(|p| curvature(p.wall, radius)).collect();
    OrbitRecord { params, pose, points, flights, curvatures }
}

/// Polygonal orbit with winding number `k` and a perpendicular scatterer hit.
pub fn build_type_a(params: &TableParams) -> Result<OrbitRecord> {
    if params.config != Config::TypeA {
        return Err(BilliardError::InvalidTable("build_type_a needs a type (a) table".into()));
    }
    let pose = scatterer_pose(params)?;
    let (theta, s0) = initial_state(params);
    let mut orbit = assemble(*params, pose, theta, s0, PI / 2.0);
    // closed forms for the scatterer legs
    let n = params.n as usize;
    let (sin_t, r, d) = (theta.sin(), params.radius, params.delta);
    orbit.flights[n - 1] = sin_t - r - d;
    orbit.flights[n] = sin_t - r - d;
    orbit.flights[2 * n] = sin_t - r + d;
    orbit.flights[2 * n + 1] = sin_t - r + d;
    Ok(orbit)
}

/// Detuned orbit with `θ₀ = π/n + ε` on the tangent scatterer.
pub fn build_type_b(n: u32, epsilon: f64) -> Result<OrbitRecord> {
    let params = TableParams::type_b(n, epsilon)?;
    let pose = scatterer_pose(&params)?;
    let (theta, s0) = initial_state(&params);
    Ok(assemble(params, pose, theta, s0, PI / 2.0 + n as f64 * epsilon))
}

/// Largest coordinate mismatch after following `points[0]` around the full
/// period with the ray-casting oracle.
pub fn verify_closure(orbit: &OrbitRecord) -> f64 {
    let mut p = orbit.points[0];
    for _ in 0..orbit.period() {
        match generic_step(&p, &orbit.pose) {
            Ok(step) => p = step.point,
            Err(_) => return f64::INFINITY,
        }
    }
    p.distance(&orbit.points[0])
}

/// Largest single-step mismatch between the stored sequence and the oracle,
/// covering both phase points and flight lengths.
pub fn step_residual(orbit: &OrbitRecord) -> f64 {
    let m = orbit.period();
    (0..m)
        .map(|i| match generic_step(&orbit.points[i], &orbit.pose) {
            Ok(step) => step
                .point
                .distance(&orbit.points[(i + 1) % m])
                .max((step.flight - orbit.flights[i]).abs()),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}
