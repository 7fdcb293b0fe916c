//! Numerical island evidence: follow seeds near `z₀` under the full period
//! map and record how far they wander.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{BilliardError, Result};
use crate::geometry::{initial_state, scatterer_pose, TableParams};
use crate::map::{generic_step, BirkhoffCoords, PhasePoint, Wall};

/// Seeds used by [`island_sampler`] when none are given.
pub const DEFAULT_SEEDS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeEvent {
    pub seed: usize,
    pub iteration: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTrace {
    pub angle: f64,
    /// `z₀` offset seed followed by its iterates, in `(s, r)`.
    pub iterates: Vec<BirkhoffCoords>,
    pub max_excursion: f64,
    pub escape: Option<EscapeEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandSample {
    pub n: u32,
    pub epsilon: f64,
    pub radius: f64,
    pub center: BirkhoffCoords,
    pub seeds: Vec<SeedTrace>,
    pub max_excursion: f64,
}

impl IslandSample {
    pub fn escapes(&self) -> impl Iterator<Item = &EscapeEvent> {
        self.seeds.iter().filter_map(|s| s.escape.as_ref())
    }
}

fn distance(a: &BirkhoffCoords, b: &BirkhoffCoords) -> f64 {
    let ds = (a.s - b.s + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
    ds.hypot(a.r - b.r)
}

fn expected_wall(step: usize, n: usize) -> Wall {
    if step == n || step == 2 * n + 1 {
        Wall::Inner
    } else {
        Wall::Outer
    }
}

/// Iterate `B^{2n+2}` from seeds at the given angles on the circle of
/// `radius` about `z₀`, keeping every iterate.
pub fn island_cloud(n: u32, epsilon: f64, radius: f64, iterations: usize, angles: &[f64]) -> Result<IslandSample> {
    if !(radius >= 0.0) {
        return Err(BilliardError::Domain(format!("radius must be non-negative, got {radius}")));
    }
    let params = TableParams::type_b(n, epsilon)?;
    let pose = scatterer_pose(&params)?;
    let (theta0, s0) = initial_state(&params);
    let center = BirkhoffCoords { s: s0, r: theta0.cos() };
    let period = 2 * n as usize + 2;

    let seeds = angles
        .iter()
        .enumerate()
        .map(|(index, &angle)| {
            let start = BirkhoffCoords { s: center.s + radius * angle.cos(), r: center.r + radius * angle.sin() };
            let mut trace = SeedTrace { angle, iterates: vec![start], max_excursion: distance(&start, &center), escape: None };
            let escape = |iteration, reason: String| Some(EscapeEvent { seed: index, iteration, reason });
            let mut p = match PhasePoint::from_birkhoff(Wall::Outer, start) {
                Ok(p) => p,
                Err(e) => {
                    trace.escape = escape(0, e.to_string());
                    return trace;
                }
            };
            'outer: for it in 1..=iterations {
                for step in 1..=period {
                    match generic_step(&p, &pose) {
                        Ok(next) if next.point.wall == expected_wall(step, n as usize) => p = next.point,
                        Ok(next) => {
                            trace.escape = escape(it, format!("collision {step} hit the {:?} wall", next.point.wall));
                            break 'outer;
                        }
                        Err(e) => {
                            trace.escape = escape(it, e.to_string());
                            break 'outer;
                        }
                    }
                }
                let z = p.to_birkhoff();
                trace.max_excursion = trace.max_excursion.max(distance(&z, &center));
                trace.iterates.push(z);
            }
            trace
        })
        .collect::<Vec<_>>();
    let max_excursion = seeds.iter().map(|s| s.max_excursion).fold(0.0, f64::max);
    Ok(IslandSample { n, epsilon, radius, center, seeds, max_excursion })
}

/// Evenly spaced seed angles.
pub fn seed_angles(count: usize) -> Vec<f64> {
    (0..count).map(|j| TAU * j as f64 / count as f64).collect()
}

/// Largest distance from `z₀` reached by [`DEFAULT_SEEDS`] seeds started on
/// the circle of `radius`. Escaped seeds contribute `∞`.
pub fn island_sampler(n: u32, epsilon: f64, radius: f64, iterations: usize) -> Result<f64> {
    let sample = island_cloud(n, epsilon, radius, iterations, &seed_angles(DEFAULT_SEEDS))?;
    Ok(if sample.escapes().next().is_some() { f64::INFINITY } else { sample.max_excursion })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_radius_stays_put() {
        let cloud = island_cloud(3, 0.02, 0.0, 50, &[0.0]).unwrap();
        assert!(cloud.max_excursion < 1e-9, "{}", cloud.max_excursion);
        assert_eq!(cloud.seeds[0].iterates.len(), 51);
    }
}
