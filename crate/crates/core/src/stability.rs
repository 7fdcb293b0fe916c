//! Linear stability: per-bounce derivatives, monodromy products, closed-form
//! traces and the admissibility analysis of the type-(a) and type-(b) families.
//!
//! Per-bounce derivatives are returned in Birkhoff coordinates `(s, cos θ)`,
//! where they have unit determinant. The textbook angle form is available via
//! [`bounce_jacobian_angle`]; it differs from the Birkhoff form by a diagonal
//! change of variables, so full-period traces agree.

use std::f64::consts::PI;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{BilliardError, Result};
use crate::geometry::{chord_clearance_radius, interior_radius};
use crate::numerics::bisect;
use crate::orbits::{build_type_b, OrbitRecord};

/// Half-width of the parabolic band around `|tr| = 2`.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Smallest admissible `sin θ` of an outgoing angle.
pub const GRAZING_SIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub m: [[f64; 2]; 2],
}

impl Jacobian2 {
    pub const IDENTITY: Self = Self { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

impl Mul for Jacobian2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.m, rhs.m);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// The classical derivative in `(s, θ)`, including its leading minus sign.
pub fn bounce_jacobian_angle(tau: f64, kappa: f64, kappa1: f64, theta: f64, theta1: f64) -> Result<Jacobian2> {
    let (s, s1) = (theta.sin(), theta1.sin());
    if s1 < GRAZING_SIN {
        return Err(BilliardError::Grazing { sin_theta: s1 });
    }
    Ok(Jacobian2::new(
        -(tau * kappa + s) / s1,
        -tau / s1,
        -((tau * kappa * kappa1 + kappa1 * s) / s1 + kappa),
        -(tau * kappa1 / s1 + 1.0),
    ))
}

/// Derivative of one bounce in Birkhoff coordinates (unit determinant).
pub fn bounce_jacobian(tau: f64, kappa: f64, kappa1: f64, theta: f64, theta1: f64) -> Result<Jacobian2> {
    let (s, s1) = (theta.sin(), theta1.sin());
    if s < GRAZING_SIN {
        return Err(BilliardError::Grazing { sin_theta: s });
    }
    let a = bounce_jacobian_angle(tau, kappa, kappa1, theta, theta1)?.m;
    Ok(Jacobian2::new(a[0][0], a[0][1] / s, a[1][0] * s1, a[1][1] * s1 / s))
}

/// Ordered product `DB(z_{m-1}) ··· DB(z_0)` around the orbit.
pub fn monodromy(orbit: &OrbitRecord) -> Result<Jacobian2> {
    let m = orbit.period();
    let mut acc = Jacobian2::IDENTITY;
    for i in 0..m {
        let j = (i + 1) % m;
        let step = bounce_jacobian(
            orbit.flights[i],
            orbit.curvatures[i],
            orbit.curvatures[j],
            orbit.points[i].theta,
            orbit.points[j].theta,
        )?;
        acc = step * acc;
    }
    Ok(acc)
}

/// Full-period trace of the type-(a) orbit:
/// `2 - 16nδ²(nR² - R sin(kπ/n) - nδ²) / (R² sin²(kπ/n))`.
pub fn trace_closed_form(n: u32, k: u32, radius: f64, delta: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(BilliardError::Domain(format!("radius must be positive, got {radius}")));
    }
    let nf = n as f64;
    let s = (k as f64 * PI / nf).sin();
    let d2 = delta * delta;
    Ok(2.0 - 16.0 * nf * d2 * (nf * radius * radius - radius * s - nf * d2) / (radius * radius * s * s))
}

/// Radius of the saddle-center bifurcation of the type-(a) orbit.
pub fn bifurcation_radius(n: u32, k: u32, delta: f64) -> f64 {
    let nf = n as f64;
    let s = (k as f64 * PI / nf).sin();
    (s + (s * s + 4.0 * nf * nf * delta * delta).sqrt()) / (2.0 * nf)
}

/// Largest radius the `(n, k, δ)` table admits.
pub fn max_admissible_radius(n: u32, k: u32, delta: f64) -> f64 {
    interior_radius(n, k, delta).min(chord_clearance_radius(n, k, delta))
}

/// Displacement at which the bifurcation radius meets the largest admissible
/// radius; the stable region in the `(δ, R)` plane closes there.
pub fn region_crossing_delta(n: u32, k: u32) -> Result<f64> {
    let (nf, t) = (n as f64, k as f64 * PI / n as f64);
    let hi = t.sin().min(t.cos() * (PI / nf).tan());
    let gap = |d: f64| bifurcation_radius(n, k, d) - max_admissible_radius(n, k, d);
    bisect(gap, 0.0, hi, 1e-13)
        .ok_or_else(|| BilliardError::Singular(format!("no crossing for n={n}, k={k}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusInterval {
    /// Open lower end (the bifurcation radius).
    pub lower: f64,
    /// Closed upper end.
    pub upper: f64,
}

pub const ADMISSIBLE_GRID: usize = 1000;

/// Radii of linear stability: above the bifurcation radius, within the table
/// bounds, and with `|tr| < 2` confirmed on a grid. If the grid shows the trace
/// leaving through `-2`, the upper end is cut there by bisection.
pub fn admissible_interval(n: u32, k: u32, delta: f64) -> Option<RadiusInterval> {
    if !(delta > 0.0) {
        return None;
    }
    let lower = bifurcation_radius(n, k, delta);
    let upper = max_admissible_radius(n, k, delta);
    if !(upper > lower) {
        return None;
    }
    let tr = |r: f64| trace_closed_form(n, k, r, delta).unwrap_or(f64::NAN);
    let h = (upper - lower) / ADMISSIBLE_GRID as f64;
    let mut last_ok = None;
    for i in 1..=ADMISSIBLE_GRID {
        let r = lower + h * i as f64;
        if tr(r).abs() < 2.0 {
            last_ok = Some(r);
        } else if let Some(ok) = last_ok {
            let cut = bisect(|x| tr(x) + 2.0, ok, r, 1e-15).unwrap_or(ok);
            return Some(RadiusInterval { lower, upper: cut });
        } else {
            return None;
        }
    }
    last_ok.map(|_| RadiusInterval { lower, upper })
}

/// `f(x) = (x/π)·arctan(2x·sin²(π/x))`; a winding number `k` admits stable
/// star orbits at period `n` exactly when `k < f(n)`.
pub fn lemma_f(x: f64) -> f64 {
    let s = (PI / x).sin();
    x / PI * (2.0 * x * s * s).atan()
}

/// Whether `2n sin²(π/n) > tan(kπ/n)`.
pub fn star_inequality(n: u32, k: u32) -> bool {
    let nf = n as f64;
    let s = (PI / nf).sin();
    2.0 * k as f64 <= nf && 2.0 * nf * s * s > (k as f64 * PI / nf).tan()
}

pub const PERIOD_SCAN_LIMIT: u32 = 1_000_000;

/// Smallest `n >= 2k+1` satisfying the star inequality. Since `f < 2π` on the
/// whole half line, no `n` exists once `k >= 2π`.
pub fn min_period_for_k(k: u32) -> Option<u32> {
    if k as f64 >= 2.0 * PI {
        return None;
    }
    (2 * k + 1..=PERIOD_SCAN_LIMIT).find(|&n| star_inequality(n, k))
}

/// Largest winding number satisfying the star inequality at period `n`.
pub fn max_admissible_k(n: u32) -> u32 {
    (1..=n / 2).filter(|&k| star_inequality(n, k)).max().unwrap_or(0)
}

fn type_b_linear_coefficient(n: u32) -> f64 {
    let t = PI / n as f64;
    let nf = n as f64;
    let (c, cot) = (t.cos(), 1.0 / t.tan());
    16.0 * nf * (c - nf * cot + nf * c * cot) / (c - 1.0)
}

/// First-order expansion of the type-(b) trace in `ε`.
pub fn trace_b_expansion(n: u32, epsilon: f64) -> f64 {
    2.0 - type_b_linear_coefficient(n) * epsilon
}

/// `-d tr / dε` at `ε = 0` for the type-(b) family.
pub fn trace_b_slope(n: u32) -> f64 {
    type_b_linear_coefficient(n)
}

/// Leading-order `ε` at which the type-(b) trace reaches `-2`.
pub fn epsilon_star(n: u32) -> f64 {
    4.0 / type_b_linear_coefficient(n)
}

/// Type-(b) full-period trace from the numeric monodromy.
pub fn trace_type_b(n: u32, epsilon: f64) -> Result<f64> {
    Ok(monodromy(&build_type_b(n, epsilon)?)?.trace())
}

/// Derivative of the half-period map `ℛ∘B^{n+1}` of the type-(b) orbit at
/// its first outer collision, in Birkhoff coordinates.
pub fn reduced_monodromy_type_b(n: u32, epsilon: f64) -> Result<Jacobian2> {
    let orbit = build_type_b(n, epsilon)?;
    let mut acc = Jacobian2::IDENTITY;
    for i in 0..=n as usize {
        let step = bounce_jacobian(
            orbit.flights[i],
            orbit.curvatures[i],
            orbit.curvatures[i + 1],
            orbit.points[i].theta,
            orbit.points[i + 1].theta,
        )?;
        acc = step * acc;
    }
    // the mirror acts as -1 on (s, r)
    let m = acc.m;
    Ok(Jacobian2::new(-m[0][0], -m[0][1], -m[1][0], -m[1][1]))
}

/// Trace of the half-period map `ℛ∘B^{n+1}` of the type-(b) orbit. The
/// full-period trace is its square minus two, so it never drops below `-2`.
pub fn reduced_trace_type_b(n: u32, epsilon: f64) -> Result<f64> {
    Ok(reduced_monodromy_type_b(n, epsilon)?.trace())
}

fn reduced_trace_root(n: u32, target: f64, lo: f64) -> Result<f64> {
    let f = |e: f64| reduced_trace_type_b(n, e).map(|t| t - target).unwrap_or(f64::NAN);
    let limit = PI / (n as f64 * (n as f64 - 1.0));
    let mut a = lo;
    let mut b = lo * 1.25;
    while f(b) < 0.0 {
        a = b;
        b *= 1.25;
        if b > limit {
            break;
        }
    }
    if !(f(b) >= 0.0) {
        return Err(BilliardError::Singular(format!(
            "type (b) table at n={n} becomes invalid before the half-period trace reaches {target}"
        )));
    }
    bisect(f, a, b, a * 1e-14)
        .ok_or_else(|| BilliardError::Singular(format!("bisection failed for n={n}")))
}

/// `ε` at which the full type-(b) trace first reaches `-2` (half-period trace
/// zero), refining the leading-order [`epsilon_star`].
pub fn epsilon_star_numeric(n: u32) -> Result<f64> {
    reduced_trace_root(n, 0.0, 0.5 * epsilon_star(n))
}

/// `ε` past which the type-(b) orbit is hyperbolic (full trace above `2`).
pub fn epsilon_hyperbolic(n: u32) -> Result<f64> {
    let start = epsilon_star_numeric(n)?;
    reduced_trace_root(n, 2.0, start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

pub fn classify(trace: f64) -> Classification {
    let a = trace.abs();
    if a < 2.0 - CLASSIFY_TOL {
        Classification::Elliptic
    } else if a > 2.0 + CLASSIFY_TOL {
        Classification::Hyperbolic
    } else {
        Classification::Parabolic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub trace: f64,
    pub classification: Classification,
    /// `(re, im)` of `λ` and `λ⁻¹`.
    pub eigenvalues: [(f64, f64); 2],
    /// Argument of `λ` in `(0, π)` when elliptic.
    pub mu: Option<f64>,
}

impl StabilityReport {
    pub fn from_trace(trace: f64) -> Self {
        let classification = classify(trace);
        let half = trace / 2.0;
        let (eigenvalues, mu) = if half.abs() < 1.0 {
            let mu = half.acos();
            let (re, im) = (mu.cos(), mu.sin());
            ([(re, im), (re, -im)], (classification == Classification::Elliptic).then_some(mu))
        } else {
            let root = (half * half - 1.0).sqrt();
            // pick the larger-magnitude root first and divide for the other
            let big = half + half.signum() * root;
            ([(big, 0.0), (1.0 / big, 0.0)], None)
        };
        Self { trace, classification, eigenvalues, mu }
    }
}

pub fn stability_report(orbit: &OrbitRecord) -> Result<StabilityReport> {
    Ok(StabilityReport::from_trace(monodromy(orbit)?.trace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TableParams;
    use crate::orbits::build_type_a;

    #[test]
    fn flat_wall_derivative() {
        let j = bounce_jacobian_angle(0.7, 0.0, 0.0, 0.9, 0.9).unwrap();
        let expect = Jacobian2::new(-1.0, -0.7 / 0.9_f64.sin(), 0.0, -1.0);
        assert!(j.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn disk_bounces_compose_to_a_shear() {
        let n = 6;
        let th = PI / n as f64;
        let one = bounce_jacobian_angle(2.0 * th.sin(), -1.0, -1.0, th, th).unwrap();
        let mut acc = Jacobian2::IDENTITY;
        for _ in 0..n - 1 {
            acc = one * acc;
        }
        let expect = Jacobian2::new(1.0, -2.0 * (n - 1) as f64, 0.0, 1.0);
        assert!(acc.max_abs_diff(&expect) < 1e-13);
        let b = bounce_jacobian(2.0 * th.sin(), -1.0, -1.0, th, th).unwrap();
        assert!((b.det() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grazing_is_rejected() {
        assert!(matches!(
            bounce_jacobian(0.1, -1.0, -1.0, 0.5, 1e-14),
            Err(BilliardError::Grazing { .. })
        ));
    }

    #[test]
    fn closed_form_trace_matches_product() {
        let p = TableParams::type_a(4, 1, 0.25, 0.05).unwrap();
        let numeric = monodromy(&build_type_a(&p).unwrap()).unwrap().trace();
        let closed = trace_closed_form(4, 1, 0.25, 0.05).unwrap();
        assert!((numeric - closed).abs() < 1e-9, "{numeric} {closed}");
        assert_eq!(trace_closed_form(4, 1, 0.25, 0.0).unwrap(), 2.0);
        assert!(trace_closed_form(4, 1, 0.0, 0.1).is_err());
    }

    #[test]
    fn bifurcation_radius_is_parabolic() {
        for (n, k, d) in [(5, 1, 0.05), (7, 2, 0.01), (9, 4, 0.002)] {
            let r = bifurcation_radius(n, k, d);
            assert!((trace_closed_form(n, k, r, d).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!((bifurcation_radius(6, 1, 0.0) - (PI / 6.0).sin() / 6.0).abs() < 1e-16);
    }

    #[test]
    fn admissible_intervals() {
        let iv = admissible_interval(5, 1, 0.05).unwrap();
        assert_eq!(iv.lower, bifurcation_radius(5, 1, 0.05));
        for i in 1..=100 {
            let r = iv.lower + (iv.upper - iv.lower) * i as f64 / 100.0;
            assert!(trace_closed_form(5, 1, r, 0.05).unwrap().abs() < 2.0);
        }
        assert!(admissible_interval(5, 1, 0.0).is_none());
        assert!(admissible_interval(5, 1, 0.2).is_none());
    }

    #[test]
    fn classification_bands() {
        assert_eq!(classify(2.0), Classification::Parabolic);
        assert_eq!(classify(1.5), Classification::Elliptic);
        assert_eq!(classify(-3.0), Classification::Hyperbolic);
        assert_eq!(classify(-2.0 - 5e-10), Classification::Parabolic);
    }

    #[test]
    fn star_periods() {
        let got: Vec<_> = (2..=7).map(min_period_for_k).collect();
        assert_eq!(got, vec![Some(5), Some(9), Some(13), Some(21), Some(53), None]);
    }

    #[test]
    fn lemma_function_limit() {
        assert!((lemma_f(1e6) - 2.0 * PI).abs() < 1e-4);
        assert!(lemma_f(3.0) < lemma_f(4.0));
    }

    #[test]
    fn reports() {
        let r = StabilityReport::from_trace(1.0);
        assert_eq!(r.classification, Classification::Elliptic);
        assert!((r.mu.unwrap() - PI / 3.0).abs() < 1e-15);
        let h = StabilityReport::from_trace(-3.0);
        let (a, b) = (h.eigenvalues[0].0, h.eigenvalues[1].0);
        assert!((a * b - 1.0).abs() < 1e-15 && a < -1.0);
    }
}
