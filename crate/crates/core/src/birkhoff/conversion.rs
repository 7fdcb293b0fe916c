//! Passing between the `(s, θ)` and `(s, r = cos θ)` charts.
//!
//! The forward direction works on partial derivatives: given the derivatives
//! of `(s', θ')` with respect to `(s, θ)` at a point, it returns those of
//! `(s', r')` with respect to `(s, r)` by the chain rule through
//! `θ = arccos r` on the input side and `r' = cos θ'` on the output side.
//! The reverse direction composes jets directly.

use crate::jet::{monomial_index, Jet3, N_MONOMIALS};
use crate::real::Real;

/// Partial derivatives `∂^{i+j}f/∂x^i∂y^j`, stored in jet monomial order.
pub type Derivatives<S> = [S; N_MONOMIALS];

fn at<S: Real>(d: &Derivatives<S>, i: usize, j: usize) -> S {
    d[monomial_index(i, j).expect("degree at most three")]
}

fn from_fn<S: Real>(f: impl Fn(usize, usize) -> S) -> Derivatives<S> {
    std::array::from_fn(|k| {
        let (i, j) = crate::jet::MONOMIALS[k];
        f(i as usize, j as usize)
    })
}

/// Derivatives of `arccos` at `cos θ`: `(dθ/dr, d²θ/dr², d³θ/dr³)`.
fn arccos_derivatives<S: Real>(theta: S) -> (S, S, S) {
    let (s, c) = (theta.sin(), theta.cos());
    let s3 = s * s * s;
    let s5 = s3 * s * s;
    (-(S::one() / s), -(c / s3), -((c * c * 2.0 + 1.0) / s5))
}

/// Replace the second input `θ` by `r` in `g(s, θ)`, where `θ = arccos r`
/// and `theta` is the angle at the expansion point.
fn substitute_input<S: Real>(g: &Derivatives<S>, theta: S) -> Derivatives<S> {
    let (t1, t2, t3) = arccos_derivatives(theta);
    let g = |i, j| at(g, i, j);
    from_fn(|i, j| match (i, j) {
        (0, 0) => g(0, 0),
        (i, 0) => g(i, 0),
        (i, 1) => g(i, 1) * t1,
        (i, 2) => g(i, 2) * t1 * t1 + g(i, 1) * t2,
        (0, 3) => g(0, 3) * t1 * t1 * t1 + g(0, 2) * t1 * t2 * 3.0 + g(0, 1) * t3,
        _ => unreachable!(),
    })
}

/// Derivatives of `cos(h(x, y))` from those of `h`.
fn cosine_of<S: Real>(h: &Derivatives<S>) -> Derivatives<S> {
    let (c, s) = (at(h, 0, 0).cos(), at(h, 0, 0).sin());
    // first partials indexed by variable: 0 -> x, 1 -> y
    let d1 = [at(h, 1, 0), at(h, 0, 1)];
    let d2 = |p: usize, q: usize| at(h, (p == 0) as usize + (q == 0) as usize, (p == 1) as usize + (q == 1) as usize);
    let d3 = |p: usize, q: usize, w: usize| {
        let nx = [p, q, w].iter().filter(|&&v| v == 0).count();
        at(h, nx, 3 - nx)
    };
    // a representative variable list for each monomial
    let vars = |i: usize, j: usize| -> Vec<usize> { std::iter::repeat_n(0, i).chain(std::iter::repeat_n(1, j)).collect() };
    from_fn(|i, j| {
        let v = vars(i, j);
        match v.len() {
            0 => c,
            1 => -(s * d1[v[0]]),
            2 => -(c * d1[v[0]] * d1[v[1]]) - s * d2(v[0], v[1]),
            3 => {
                let (p, q, w) = (v[0], v[1], v[2]);
                s * d1[p] * d1[q] * d1[w]
                    - c * (d2(p, q) * d1[w] + d2(p, w) * d1[q] + d2(q, w) * d1[p])
                    - s * d3(p, q, w)
            }
            _ => unreachable!(),
        }
    })
}

/// From the `(s, θ)` derivatives of `(s', θ')` at a point with input angle
/// `theta`, the `(s, r)` derivatives of `(s', r')`.
pub fn angle_to_cosine<S: Real>(
    s_out: &Derivatives<S>,
    theta_out: &Derivatives<S>,
    theta: S,
) -> (Derivatives<S>, Derivatives<S>) {
    let s_r = substitute_input(s_out, theta);
    let theta_r = substitute_input(theta_out, theta);
    (s_r, cosine_of(&theta_r))
}

/// Taylor coefficients to partial derivatives.
pub fn jet_derivatives<S: Real>(jet: &Jet3<S>) -> Derivatives<S> {
    from_fn(|i, j| jet.derivative(i, j))
}

/// Partial derivatives to a jet with the given derivatives.
pub fn jet_from_derivatives<S: Real>(d: &Derivatives<S>) -> Jet3<S> {
    let mut jet = Jet3::constant(S::zero());
    for (k, &(i, j)) in crate::jet::MONOMIALS.iter().enumerate() {
        jet.coeffs[k] = d[k] / (factorial(i) * factorial(j));
    }
    jet
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).product::<u32>() as f64
}

/// Convert `(s', θ')` jets in `(Δs, Δθ)` into `(s', r')` jets in `(Δs, Δr)`.
pub fn angle_jets_to_cosine<S: Real>(s_out: &Jet3<S>, theta_out: &Jet3<S>, theta: S) -> (Jet3<S>, Jet3<S>) {
    let (s, r) = angle_to_cosine(&jet_derivatives(s_out), &jet_derivatives(theta_out), theta);
    (jet_from_derivatives(&s), jet_from_derivatives(&r))
}

/// Convert `(s', r')` jets in `(Δs, Δr)` into `(s', θ')` jets in
/// `(Δs, Δθ)`. `theta` is the input angle at the expansion point and
/// `theta_out` the output angle.
pub fn cosine_jets_to_angle<S: Real>(
    s_out: &Jet3<S>,
    r_out: &Jet3<S>,
    theta: S,
    theta_out: S,
) -> (Jet3<S>, Jet3<S>) {
    let x = Jet3::var_x(S::zero());
    // Δr as a function of Δθ
    let dr = Jet3::var_y(theta).cos() - Jet3::constant(theta.cos());
    let s = s_out.compose(&x, &dr);
    let r = r_out.compose(&x, &dr);
    (s, r.acos_with_angle(theta_out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_of_linear_function() {
        // h = 0.4 + 2x - y
        let mut h = [0.0; N_MONOMIALS];
        h[0] = 0.4;
        h[1] = 2.0;
        h[2] = -1.0;
        let d = cosine_of(&h);
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        assert!((d[monomial_index(2, 1).unwrap()] - s * 4.0 * -1.0).abs() < 1e-15);
        assert!((d[monomial_index(1, 1).unwrap()] - -c * 2.0 * -1.0).abs() < 1e-15);
        assert!((d[monomial_index(0, 3).unwrap()] - s * -1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_map_round_trip() {
        let theta = 1.1_f64;
        let s = Jet3::var_x(0.2);
        let t = Jet3::var_y(theta);
        let (s1, r1) = angle_jets_to_cosine(&s, &t, theta);
        // identity in (s, r): r' = cos θ + Δr
        assert!((r1.coeff(0, 1) - 1.0).abs() < 1e-15);
        for k in 3..N_MONOMIALS {
            assert!(r1.coeffs[k].abs() < 1e-14, "{k} {}", r1.coeffs[k]);
        }
        let (s2, t2) = cosine_jets_to_angle(&s1, &r1, theta, theta);
        for k in 0..N_MONOMIALS {
            assert!((s2.coeffs[k] - s.coeffs[k]).abs() < 1e-14);
            assert!((t2.coeffs[k] - t.coeffs[k]).abs() < 1e-14);
        }
    }
}
