//! Nonlinear stability of the tangent-scatterer orbit.
//!
//! The orbit is symmetric under the mirror `ℛ`, so the period map is the
//! square of the reduced map `F = ℛ∘B_out∘B_in∘B_D`, which fixes the first
//! outer collision `z₀`. We expand `F` to third order about `z₀` in Birkhoff
//! coordinates `(s, r = cos θ)` using truncated Taylor jets evaluated in
//! double-double arithmetic, then evaluate the first Birkhoff (twist)
//! coefficient from the expansion.
//!
//! Angle convention for the twist formula: the coefficient is evaluated with
//! the principal rotation angle `μ = arctan(v/u)`, where `λ = u + iv` is the
//! eigenvalue of the linear part. For small `ε`, `u` is close to `-1` and this
//! angle is small and negative; the report also carries the eigenvalue
//! argument in `(0, π)`, which is what the resonance test uses.

pub mod conversion;
pub mod finite_diff;
pub mod island;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{BilliardError, Result};
use crate::geometry::{tangency_radius_b_generic, type_b_center_distance, TableParams};
use crate::jet::{monomial_index, Jet3, N_MONOMIALS};
use crate::map::{disk_step, in_step, out_step, Disk};
use crate::numerics::extrapolate_to_zero;
use crate::real::{wrap_from, Real};
use crate::stability::epsilon_star;

/// Tolerance on `|λ^m - 1|` for the third- and fourth-order resonances.
pub const RESONANCE_TOL: f64 = 1e-8;
/// `A` counts as nonzero when `|A| > NONZERO_SCALE / ε²`.
pub const NONZERO_SCALE: f64 = 1e-6;

pub use crate::dd::Dd;

/// The reduced map of the type-(b) table with parameters `(n, ε)`, with all
/// geometric constants held in the scalar type `S`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedMap<S> {
    pub n: u32,
    pub epsilon: f64,
    pub disk: Disk<S>,
    /// Fixed point `(s₀, θ₀)`.
    pub s0: S,
    pub theta0: S,
}

impl<S: Real> ReducedMap<S> {
    pub fn new(n: u32, epsilon: f64) -> Result<Self> {
        TableParams::type_b(n, epsilon)?;
        let nf = n as f64;
        let theta0 = S::pi() / nf + epsilon;
        let s0 = S::pi() / nf - S::pi() + S::from_f64(epsilon) * (1.0 - nf);
        let disk = Disk {
            cx: -type_b_center_distance::<S>(n, epsilon),
            cy: S::zero(),
            radius: tangency_radius_b_generic::<S>(n, epsilon),
        };
        Ok(Self { n, epsilon, disk, s0, theta0 })
    }

    /// `F` in `(s, θ)`.
    pub fn apply_angle(&self, s: S, theta: S) -> Result<(S, S)> {
        let (s1, t1) = disk_step(s, theta, self.n - 1);
        let (s2, t2) = in_step(s1, t1, &self.disk)?;
        let (s3, t3) = out_step(s2, t2, &self.disk)?;
        Ok((wrap_from(-s3, -PI), S::pi() - t3))
    }

    /// `F` in `(s, r)`.
    pub fn apply(&self, s: S, r: S) -> Result<(S, S)> {
        let (s1, t1) = self.apply_angle(s, r.acos())?;
        Ok((s1, t1.cos()))
    }

    /// `B^{n+1}` without the mirror, in `(s, θ)`.
    pub fn half_period(&self, s: S, theta: S) -> Result<(S, S)> {
        let (s1, t1) = disk_step(s, theta, self.n - 1);
        let (s2, t2) = in_step(s1, t1, &self.disk)?;
        out_step(s2, t2, &self.disk)
    }

    pub fn fixed_point_r(&self) -> S {
        self.theta0.cos()
    }
}

/// Taylor coefficients of both outputs about the fixed point. Index `k` holds
/// the coefficient of `s^i r^j` with `(i, j) = MONOMIALS[k]`; slot 0 (the
/// constant) is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorJet3<S = f64> {
    pub a: [S; N_MONOMIALS],
    pub b: [S; N_MONOMIALS],
}

impl<S: Real> TaylorJet3<S> {
    pub fn from_jets(s_out: &Jet3<S>, r_out: &Jet3<S>) -> Self {
        let mut a = s_out.coeffs;
        let mut b = r_out.coeffs;
        a[0] = S::zero();
        b[0] = S::zero();
        Self { a, b }
    }

    pub fn a(&self, i: usize, j: usize) -> S {
        monomial_index(i, j).map_or(S::zero(), |k| self.a[k])
    }

    pub fn b(&self, i: usize, j: usize) -> S {
        monomial_index(i, j).map_or(S::zero(), |k| self.b[k])
    }

    pub fn trace(&self) -> S {
        self.a(1, 0) + self.b(0, 1)
    }

    pub fn det(&self) -> S {
        self.a(1, 0) * self.b(0, 1) - self.a(0, 1) * self.b(1, 0)
    }

    pub fn to_f64(&self) -> TaylorJet3<f64> {
        TaylorJet3 {
            a: std::array::from_fn(|k| self.a[k].value()),
            b: std::array::from_fn(|k| self.b[k].value()),
        }
    }
}

/// Output jets `(s', r')` of `F` in the variables `(Δs, Δr)` about `z₀`.
pub fn reduced_jets(n: u32, epsilon: f64) -> Result<(Jet3<Dd>, Jet3<Dd>)> {
    let map = ReducedMap::<Jet3<Dd>>::new(n, epsilon)?;
    let s0 = map.s0.constant_term();
    let theta0 = map.theta0.constant_term();
    let s = Jet3::var_x(s0);
    // θ is anchored at θ₀ instead of acos(cos θ₀), which loses digits near r = 1
    let theta = Jet3::var_y(theta0.cos()).acos_with_angle(theta0);
    let (s1, t1) = map.apply_angle(s, theta)?;
    Ok((s1, t1.cos()))
}

/// Output jets `(s', θ')` of `F` in the variables `(Δs, Δθ)` about `z₀`.
pub fn reduced_angle_jets(n: u32, epsilon: f64) -> Result<(Jet3<Dd>, Jet3<Dd>)> {
    let map = ReducedMap::<Jet3<Dd>>::new(n, epsilon)?;
    let s = Jet3::var_x(map.s0.constant_term());
    let theta = Jet3::var_y(map.theta0.constant_term());
    map.apply_angle(s, theta)
}

/// Third-order expansion of `F` about `z₀` in `(s, r)`.
pub fn taylor_jet(n: u32, epsilon: f64) -> Result<TaylorJet3<Dd>> {
    let (s1, r1) = reduced_jets(n, epsilon)?;
    Ok(TaylorJet3::from_jets(&s1, &r1))
}

/// Distance of `F(z₀)` from `z₀` in the double-double pipeline.
pub fn fixed_point_residual(n: u32, epsilon: f64) -> Result<f64> {
    let (s1, r1) = reduced_jets(n, epsilon)?;
    let map = ReducedMap::<Dd>::new(n, epsilon)?;
    let ds = (s1.constant_term() - map.s0).value().abs();
    let dr = (r1.constant_term() - map.fixed_point_r()).value().abs();
    Ok(ds.max(dr))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CTerms<S = f64> {
    pub im_c21: S,
    pub abs_c20_sq: S,
    pub abs_c02_sq: S,
}

/// The three normal-form quantities entering the twist coefficient.
pub fn c_terms<S: Real>(jet: &TaylorJet3<S>) -> Result<CTerms<S>> {
    let (a10, a01, b10) = (jet.a(1, 0), jet.a(0, 1), jet.b(1, 0));
    let prod = (a01 * b10).value();
    if !(prod < 0.0) {
        return Err(BilliardError::NonEllipticNormalization { product: prod });
    }
    let a = |i, j| jet.a(i, j);
    let b = |i, j| jet.b(i, j);
    let im_c21 = a10 * (-a(1, 2) + b10 * a(0, 3) * 3.0 / a01 - a01 * b(3, 0) * 3.0 / b10 + b(1, 2)) * 0.125
        - b10 * (a(1, 2) - a01 * a(3, 0) * 3.0 / b10 - a01 * b(2, 1) / b10 + b(0, 3) * 3.0) * 0.125;
    let w1 = (-(a01 / b10)).sqrt();
    let w2 = (-(b10 / a01)).sqrt();
    let p = b10 / a01 * a(0, 2) + a(2, 0);
    let q = a01 / b10 * b(2, 0) + b(0, 2);
    let sq = |x: S| x * x;
    let abs_c20_sq = (w1 * sq(p + b(1, 1)) + w2 * sq(q + a(1, 1))) / 16.0;
    let abs_c02_sq = (w1 * sq(p - b(1, 1)) + w2 * sq(q - a(1, 1))) / 16.0;
    Ok(CTerms { im_c21, abs_c20_sq, abs_c02_sq })
}

/// `Im c21 + sin μ/(cos μ - 1)·(3|c20|² + (2cos μ - 1)/(2cos μ + 1)·|c02|²)`.
pub fn twist_formula<S: Real>(c: &CTerms<S>, cos_mu: S, sin_mu: S) -> S {
    let ratio = (cos_mu * 2.0 - 1.0) / (cos_mu * 2.0 + 1.0);
    c.im_c21 + sin_mu / (cos_mu - 1.0) * (c.abs_c20_sq * 3.0 + ratio * c.abs_c02_sq)
}

/// Eigenvalue data of an elliptic linear part with trace `tr`.
#[derive(Debug, Clone, Copy)]
struct Rotation<S> {
    /// `cos` and `sin` of the principal angle `arctan(v/u)`.
    cos_principal: S,
    sin_principal: S,
    principal: f64,
    /// Argument of `λ = u + iv`, `v > 0`.
    argument: f64,
}

fn rotation<S: Real>(tr: S) -> Result<Rotation<S>> {
    let u = tr * 0.5;
    // 1 - u² as a product keeps precision when u is near ±1
    let one_minus_u2 = (S::one() - u) * (u + 1.0);
    if !(one_minus_u2.value() > 0.0) {
        return Err(BilliardError::NotElliptic { trace: tr.value() });
    }
    let v = one_minus_u2.sqrt();
    let (uf, vf) = (u.value(), v.value());
    let sign = if uf < 0.0 { -1.0 } else { 1.0 };
    Ok(Rotation {
        cos_principal: u * sign,
        sin_principal: v * sign,
        principal: (vf / uf).atan(),
        argument: vf.atan2(uf),
    })
}

fn resonance_distance(argument: f64, order: u32) -> f64 {
    // |e^{imμ} - 1| = 2|sin(mμ/2)|
    2.0 * (order as f64 * argument / 2.0).sin().abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    /// First Birkhoff coefficient; NaN when resonant.
    #[serde(rename = "A")]
    pub birkhoff_a: f64,
    pub im_c21: f64,
    pub abs_c20_sq: f64,
    pub abs_c02_sq: f64,
    /// Eigenvalue argument in `(0, π)`.
    pub mu: f64,
    /// Principal angle `arctan(v/u)` used in the twist formula.
    pub mu_principal: f64,
    /// Trace of the linear part of the reduced map.
    pub trace: f64,
    pub resonant3: bool,
    pub resonant4: bool,
}

impl BirkhoffReport {
    pub fn is_resonant(&self) -> bool {
        self.resonant3 || self.resonant4
    }
}

/// Full report from a jet. Resonant points get `A = NaN` and their flags set.
pub fn birkhoff_report_from_jet<S: Real>(jet: &TaylorJet3<S>) -> Result<BirkhoffReport> {
    let tr = jet.trace();
    let rot = rotation(tr)?;
    let c = c_terms(jet)?;
    let resonant3 = resonance_distance(rot.argument, 3) < RESONANCE_TOL;
    let resonant4 = resonance_distance(rot.argument, 4) < RESONANCE_TOL;
    let a = if resonant3 || resonant4 {
        f64::NAN
    } else {
        twist_formula(&c, rot.cos_principal, rot.sin_principal).value()
    };
    Ok(BirkhoffReport {
        birkhoff_a: a,
        im_c21: c.im_c21.value(),
        abs_c20_sq: c.abs_c20_sq.value(),
        abs_c02_sq: c.abs_c02_sq.value(),
        mu: rot.argument,
        mu_principal: rot.principal,
        trace: tr.value(),
        resonant3,
        resonant4,
    })
}

/// The first Birkhoff coefficient; resonances are errors here.
pub fn birkhoff_a<S: Real>(jet: &TaylorJet3<S>) -> Result<BirkhoffReport> {
    let report = birkhoff_report_from_jet(jet)?;
    for (flag, order) in [(report.resonant3, 3), (report.resonant4, 4)] {
        if flag {
            return Err(BilliardError::Resonant {
                order,
                distance: resonance_distance(report.mu, order),
            });
        }
    }
    Ok(report)
}

/// Expansion plus twist coefficient for the type-(b) table `(n, ε)`.
pub fn birkhoff_report(n: u32, epsilon: f64) -> Result<BirkhoffReport> {
    birkhoff_report_from_jet(&taylor_jet(n, epsilon)?)
}

/// Whether `A` is distinguishable from zero at this `ε`.
pub fn twist_is_nonzero(a: f64, epsilon: f64) -> bool {
    a.abs() > NONZERO_SCALE / (epsilon * epsilon)
}

/// Principal rotation angle of the reduced linear part (small, negative for
/// small `ε`).
pub fn rotation_number(n: u32, epsilon: f64) -> Result<f64> {
    let jet = taylor_jet(n, epsilon)?;
    Ok(rotation(jet.trace())?.principal)
}

/// Leading-order `|μ|/√ε`:
/// `√2/sin(π/n)·√(n(n sin(2π/n) - (1 + 2cos(π/n) + cos(2π/n))))`.
pub fn rotation_coefficient(n: u32) -> f64 {
    let t = PI / n as f64;
    let nf = n as f64;
    2f64.sqrt() / t.sin() * (nf * (nf * (2.0 * t).sin() - (1.0 + 2.0 * t.cos() + (2.0 * t).cos()))).sqrt()
}

fn check_closed_form_n(n: u32) -> Result<()> {
    if n < 3 {
        return Err(BilliardError::Domain(format!("the closed form needs n >= 3, got {n}")));
    }
    Ok(())
}

/// Leading-order `A(n, ε)`, proportional to `ε⁻²`.
pub fn closed_form_a(n: u32, epsilon: f64) -> Result<f64> {
    check_closed_form_n(n)?;
    let nf = n as f64;
    let x = PI / (2.0 * nf);
    let (sx, cx) = (x.sin(), x.cos());
    let s1 = (PI / nf).sin();
    let s2 = (2.0 * PI / nf).sin();
    let c1 = (PI / nf).cos();
    let c2 = (2.0 * PI / nf).cos();
    let num = 5.0 / sx.powi(5) / cx.powi(3) * s1.powf(2.5) * (cx - nf * sx).powi(2);
    let den = 192.0 * nf * nf * epsilon * epsilon * (nf * s2 - (1.0 + 2.0 * c1 + c2)).sqrt();
    Ok(num / den * (s2 / (nf * s1 - (1.0 + c1))).sqrt())
}

/// Large-`n` form `5/(24ε²)·((π-2)/π² + (π-1)/(6n²))`.
pub fn closed_form_a_large_n(n: u32, epsilon: f64) -> Result<f64> {
    check_closed_form_n(n)?;
    let nf = n as f64;
    Ok(5.0 / (24.0 * epsilon * epsilon) * ((PI - 2.0) / (PI * PI) + (PI - 1.0) / (6.0 * nf * nf)))
}

/// `lim ε²A` from the closed form.
pub fn a_tilde_closed(n: u32) -> Result<f64> {
    closed_form_a(n, 1.0)
}

/// `lim ε²A` as `n → ∞`: `5(π-2)/(24π²)`.
pub fn a_tilde_limit() -> f64 {
    5.0 * (PI - 2.0) / (24.0 * PI * PI)
}

/// Default `ε` ladder for extrapolating `ε²A` at period `n`:
/// `{1, 1/2, 1/4}·10⁻³` at `n = 3`, scaled with the stability threshold so
/// that every rung stays deep inside the elliptic range.
pub fn epsilon_ladder(n: u32) -> [f64; 3] {
    let base = 1e-3 * epsilon_star(n) / epsilon_star(3);
    [base, base * 0.5, base * 0.25]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ATildeEstimate {
    pub n: u32,
    pub epsilons: Vec<f64>,
    /// `ε²A` at each rung.
    pub scaled: Vec<f64>,
    /// Polynomial extrapolation of `ε²A` to `ε = 0`.
    pub extrapolated: f64,
    pub reports: Vec<BirkhoffReport>,
}

/// Extrapolate `ε²A` to `ε → 0` from the given ladder.
pub fn extrapolate_a_tilde(n: u32, epsilons: &[f64]) -> Result<ATildeEstimate> {
    let mut reports = Vec::with_capacity(epsilons.len());
    for &e in epsilons {
        let r = birkhoff_report(n, e)?;
        if r.is_resonant() {
            return Err(BilliardError::Resonant {
                order: if r.resonant3 { 3 } else { 4 },
                distance: 0.0,
            });
        }
        reports.push(r);
    }
    let scaled: Vec<f64> = reports.iter().zip(epsilons).map(|(r, e)| r.birkhoff_a * e * e).collect();
    let extrapolated = extrapolate_to_zero(epsilons, &scaled);
    Ok(ATildeEstimate { n, epsilons: epsilons.to_vec(), scaled, extrapolated, reports })
}

pub fn a_tilde(n: u32) -> Result<ATildeEstimate> {
    extrapolate_a_tilde(n, &epsilon_ladder(n))
}
