//! Double-double scalar.
//!
//! Addition and multiplication come from `twofloat`, whose error-free
//! algorithms are exact to about 2⁻¹⁰⁴. Its division and elementary functions
//! are only accurate to about 10⁻¹⁷, so those are replaced here: long
//! division, Newton square root, Taylor series for `sin`/`cos` after
//! quadrant reduction and argument halving, and Newton refinement for `acos`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

use crate::real::Real;

#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd(TwoFloat);

/// π to double-double precision.
const PI_HI: f64 = std::f64::consts::PI;
const PI_LO: f64 = 1.2246467991473532e-16;

/// Series terms for `|t| < 0.05`: `0.05³¹/31!` is far below 2⁻¹⁰⁴.
const SERIES_TERMS: usize = 14;
/// Number of argument halvings before the series.
const HALVINGS: i32 = 4;

impl Dd {
    pub fn hi(&self) -> f64 {
        self.0.hi()
    }

    pub fn lo(&self) -> f64 {
        self.0.lo()
    }

    pub fn pi() -> Self {
        Dd(TwoFloat::new_add(PI_HI, PI_LO))
    }

    pub fn abs(self) -> Self {
        if self.hi() < 0.0 {
            -self
        } else {
            self
        }
    }

    /// `sin` and `cos` of `|t| ≤ 0.05` by Taylor series.
    fn sin_cos_small(t: Dd) -> (Dd, Dd) {
        let t2 = t * t;
        let mut term = t;
        let mut sin = t;
        for k in 1..SERIES_TERMS {
            term = -(term * t2) / ((2 * k) as f64 * (2 * k + 1) as f64);
            sin += term;
        }
        let mut term = Dd::from(1.0);
        let mut cos = term;
        for k in 1..SERIES_TERMS {
            term = -(term * t2) / ((2 * k - 1) as f64 * (2 * k) as f64);
            cos += term;
        }
        (sin, cos)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let half_pi = Dd::pi() * 0.5;
        let q = (self.hi() / (PI_HI / 2.0)).round();
        let r = self - half_pi * q;
        let (mut s, mut c) = Self::sin_cos_small(r * 0.5f64.powi(HALVINGS));
        for _ in 0..HALVINGS {
            (s, c) = (s * c * 2.0, (c - s) * (c + s));
        }
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi(), self.lo())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value(), f)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    /// Three-term long division.
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi() / rhs.hi();
        let r = self - rhs * q1;
        let q2 = r.hi() / rhs.hi();
        let r = r - rhs * q2;
        let q3 = r.hi() / rhs.hi();
        Dd(TwoFloat::new_add(q1, q2)) + q3
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, rhs: f64) -> Dd {
        Dd(self.0 + rhs)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, rhs: f64) -> Dd {
        Dd(self.0 - rhs)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, rhs: f64) -> Dd {
        Dd(self.0 * rhs)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, rhs: f64) -> Dd {
        self / Dd::from(rhs)
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::from(x)
    }

    fn value(&self) -> f64 {
        self.hi() + self.lo()
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// Newton refinement of the `f64` estimate on `cos y = x`.
    fn acos(self) -> Self {
        let mut y = Dd::from(self.value().clamp(-1.0, 1.0).acos());
        for _ in 0..2 {
            let (s, c) = y.sin_cos();
            if s.hi().abs() < 1e-300 {
                break;
            }
            y = y + (c - self) / s;
        }
        y
    }

    fn sqrt(self) -> Self {
        if self.hi() <= 0.0 {
            return Dd::from(self.hi().sqrt());
        }
        let y = Dd::from(self.hi().sqrt());
        y + (self - y * y) / (y * 2.0)
    }

    fn pi() -> Self {
        Dd::pi()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values from a 40-digit evaluation
    const SIN_HALF: (f64, f64) = (0.479425538604203, -5.103969860556013e-18);

    fn err(x: Dd, hi: f64, lo: f64) -> f64 {
        (x - Dd(TwoFloat::new_add(hi, lo))).value().abs()
    }

    #[test]
    fn division_is_exact_to_double_double() {
        let a = Dd::from(0.5).cos();
        let b = Dd::from(0.03).cos();
        assert!((a / b * b - a).value().abs() < 1e-31);
        assert!(((Dd::from(1.0) / 3.0) * 3.0 - 1.0).value().abs() < 1e-31);
    }

    #[test]
    fn trig_against_reference() {
        assert!(err(Dd::from(0.5).sin(), SIN_HALF.0, SIN_HALF.1) < 1e-32);
        for x in [-7.3, -2.0, 0.03, 0.5, 1.3, 2.9, 4.4, 11.0] {
            let (s, c) = Dd::from(x).sin_cos();
            assert!((s * s + c * c - 1.0).value().abs() < 1e-30, "{x}");
            let (s2, _) = (Dd::from(x) * 2.0).sin_cos();
            assert!((s2 - s * c * 2.0).value().abs() < 1e-30, "{x}");
        }
        let (s, c) = (Dd::pi() / 3.0).sin_cos();
        assert!((c - 0.5).value().abs() < 1e-31);
        assert!((s * s - 0.75).value().abs() < 1e-30);
    }

    #[test]
    fn acos_and_sqrt() {
        let x = Dd::from(0.3);
        assert!((Real::acos(x.cos()) - x).value().abs() < 1e-30);
        let small = Dd::pi() / 1000.0;
        assert!((Real::acos(small.cos()) - small).value().abs() < 1e-27);
        let r = Real::sqrt(Dd::from(2.0));
        assert!((r * r - 2.0).value().abs() < 1e-31);
    }
}
