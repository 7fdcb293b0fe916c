//! Scalar abstraction shared by the explicit billiard maps.
//!
//! The maps are written once and evaluated over plain `f64`, double-double
//! ([`crate::dd::Dd`]) and truncated Taylor jets. Branching decisions (angle wrapping,
//! clamping) always look at [`Real::value`], the leading `f64` part.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;

    /// Leading `f64` approximation of the value (constant term for jets).
    fn value(&self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn acos(self) -> Self;
    fn sqrt(self) -> Self;

    fn pi() -> Self;

    fn two_pi() -> Self {
        Self::pi() * 2.0
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

/// Shift `x` by a multiple of 2π so that its value lies in `[lo, lo + 2π)`.
pub fn wrap_from<S: Real>(x: S, lo: f64) -> S {
    let tau = std::f64::consts::TAU;
    let k = ((x.value() - lo) / tau).floor();
    if k == 0.0 {
        x
    } else {
        x - S::two_pi() * k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_keeps_interval() {
        let w = wrap_from(7.0_f64, -std::f64::consts::PI);
        assert!((w - (7.0 - std::f64::consts::TAU)).abs() < 1e-15);
        let w = wrap_from(-4.0_f64, -std::f64::consts::PI);
        assert!((w - (-4.0 + std::f64::consts::TAU)).abs() < 1e-15);
        assert_eq!(wrap_from(0.5_f64, -std::f64::consts::PI), 0.5);
    }
}
