//! Independent check on the jet expansion: tensor-product central differences
//! of the reduced map, evaluated in double-double and Richardson-extrapolated
//! over three step sizes.

use serde::{Deserialize, Serialize};

use super::{taylor_jet, Dd, ReducedMap, TaylorJet3};
use crate::error::{BilliardError, Result};
use crate::jet::{MONOMIALS, N_MONOMIALS};
use crate::numerics::richardson_even;
use crate::real::Real;

/// Relative disagreement above which the expansion is rejected.
pub const AUDIT_TOL: f64 = 1e-5;

/// One-dimensional central stencils for derivatives of order 0..=3, as
/// `(offset, weight)` pairs in units of the step. All are second order.
fn stencil(order: u8) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => unreachable!(),
    }
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).product::<u32>() as f64
}

/// Base step `10⁻³·√ε`, matched to the width of the nonlinear region.
pub fn base_step(epsilon: f64) -> f64 {
    1e-3 * epsilon.sqrt()
}

/// Taylor coefficients at step `h` (not extrapolated).
fn coefficients_at(map: &ReducedMap<Dd>, h: f64) -> Result<TaylorJet3<f64>> {
    let r0 = map.fixed_point_r();
    let mut cache = std::collections::HashMap::new();
    let mut eval = |p: i32, q: i32| -> Result<(Dd, Dd)> {
        if let Some(v) = cache.get(&(p, q)) {
            return Ok(*v);
        }
        let v = map.apply(map.s0 + h * p as f64, r0 + h * q as f64)?;
        cache.insert((p, q), v);
        Ok(v)
    };
    let mut a = [0.0; N_MONOMIALS];
    let mut b = [0.0; N_MONOMIALS];
    for (k, &(i, j)) in MONOMIALS.iter().enumerate().skip(1) {
        let (mut da, mut db) = (Dd::from(0.0), Dd::from(0.0));
        for &(p, wp) in stencil(i) {
            for &(q, wq) in stencil(j) {
                let (s1, r1) = eval(p, q)?;
                da += s1 * (wp * wq);
                db += r1 * (wp * wq);
            }
        }
        let scale = h.powi((i + j) as i32) * factorial(i) * factorial(j);
        a[k] = (da / scale).value();
        b[k] = (db / scale).value();
    }
    Ok(TaylorJet3 { a, b })
}

/// Finite-difference estimate of the third-order expansion at `(n, ε)`.
pub fn finite_difference_jet(n: u32, epsilon: f64) -> Result<TaylorJet3<f64>> {
    let map = ReducedMap::<Dd>::new(n, epsilon)?;
    let h = base_step(epsilon);
    let levels = [
        coefficients_at(&map, h)?,
        coefficients_at(&map, h / 2.0)?,
        coefficients_at(&map, h / 4.0)?,
    ];
    let pick = |f: &dyn Fn(&TaylorJet3<f64>) -> f64| richardson_even(&levels.iter().map(f).collect::<Vec<_>>(), 2.0);
    Ok(TaylorJet3 {
        a: std::array::from_fn(|k| pick(&|t| t.a[k])),
        b: std::array::from_fn(|k| pick(&|t| t.b[k])),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetAudit {
    pub jet: TaylorJet3<f64>,
    pub finite_difference: TaylorJet3<f64>,
    /// Largest relative disagreement over all coefficients.
    pub max_relative: f64,
}

/// Relative disagreement of one coefficient. Coefficients far below the
/// largest one at the same order are compared against that scale instead of
/// themselves.
fn relative(x: f64, y: f64, floor: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(floor)
}

pub fn compare(jet: &TaylorJet3<f64>, fd: &TaylorJet3<f64>) -> (usize, f64) {
    let mut worst = (0, 0.0);
    for (k, &(i, j)) in MONOMIALS.iter().enumerate().skip(1) {
        let order = i + j;
        let same_order = MONOMIALS
            .iter()
            .enumerate()
            .filter(|(_, m)| m.0 + m.1 == order)
            .map(|(m, _)| jet.a[m].abs().max(jet.b[m].abs()))
            .fold(0.0, f64::max);
        let floor = 1e-8 * same_order;
        for rel in [relative(jet.a[k], fd.a[k], floor), relative(jet.b[k], fd.b[k], floor)] {
            if rel > worst.1 {
                worst = (k, rel);
            }
        }
    }
    worst
}

/// Jet expansion checked against finite differences; a disagreement beyond
/// [`AUDIT_TOL`] is a precision error.
pub fn audited_taylor_jet(n: u32, epsilon: f64) -> Result<JetAudit> {
    let jet = taylor_jet(n, epsilon)?.to_f64();
    let fd = finite_difference_jet(n, epsilon)?;
    let (k, max_relative) = compare(&jet, &fd);
    if max_relative > AUDIT_TOL {
        let (i, j) = MONOMIALS[k];
        return Err(BilliardError::Precision { coefficient: format!("s^{i} r^{j}"), relative: max_relative });
    }
    Ok(JetAudit { jet, finite_difference: fd, max_relative })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_cubics() {
        for order in 0..=3u8 {
            for m in 0..=(order + 1).min(3) {
                let d: f64 = stencil(order).iter().map(|&(p, w)| w * (p as f64).powi(m as i32)).sum();
                let expect = if m == order { factorial(m) } else { 0.0 };
                assert!((d - expect).abs() < 1e-15, "order {order} monomial {m}");
            }
        }
    }
}
