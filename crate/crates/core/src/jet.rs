//! Truncated bivariate Taylor polynomials of total degree three.
//!
//! A [`Jet3`] carries the value of a quantity together with its Taylor
//! coefficients in two input variables `(x, y)`; arithmetic and elementary
//! functions propagate them exactly up to rounding, dropping every monomial of
//! degree four or more.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

/// Number of monomials `x^i y^j` with `i + j <= 3`.
pub const N_MONOMIALS: usize = 10;

/// Exponents `(i, j)` of each stored monomial, ordered by total degree.
pub const MONOMIALS: [(u8, u8); N_MONOMIALS] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// Storage index of `x^i y^j`, or `None` past degree three.
pub const fn monomial_index(i: usize, j: usize) -> Option<usize> {
    let d = i + j;
    if d > 3 {
        return None;
    }
    // degree d starts at d(d+1)/2, ordered by decreasing power of x
    Some(d * (d + 1) / 2 + j)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3<T> {
    pub coeffs: [T; N_MONOMIALS],
}

impl<T: Real> Jet3<T> {
    pub fn constant(c: T) -> Self {
        let mut coeffs = [T::zero(); N_MONOMIALS];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The first input variable, expanded about `at`.
    pub fn var_x(at: T) -> Self {
        let mut j = Self::constant(at);
        j.coeffs[1] = T::one();
        j
    }

    /// The second input variable, expanded about `at`.
    pub fn var_y(at: T) -> Self {
        let mut j = Self::constant(at);
        j.coeffs[2] = T::one();
        j
    }

    pub fn constant_term(&self) -> T {
        self.coeffs[0]
    }

    /// Coefficient of `x^i y^j` (zero past degree three).
    pub fn coeff(&self, i: usize, j: usize) -> T {
        monomial_index(i, j).map_or(T::zero(), |k| self.coeffs[k])
    }

    /// Partial derivative `d^{i+j} / dx^i dy^j` at the expansion point.
    pub fn derivative(&self, i: usize, j: usize) -> T {
        self.coeff(i, j) * (factorial(i) * factorial(j))
    }

    /// The same polynomial with the constant term removed.
    pub fn nilpotent(&self) -> Self {
        let mut j = *self;
        j.coeffs[0] = T::zero();
        j
    }

    pub fn scale(&self, t: T) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| self.coeffs[k] * t),
        }
    }

    pub fn map_coeffs<U: Real>(&self, f: impl Fn(T) -> U) -> Jet3<U> {
        Jet3 {
            coeffs: std::array::from_fn(|k| f(self.coeffs[k])),
        }
    }

    /// `f(c + h)` from the value and first three derivatives of `f` at `c`,
    /// where `c` is the constant term and `h` the remaining part.
    pub fn compose_univariate(&self, f0: T, f1: T, f2: T, f3: T) -> Self {
        let h = self.nilpotent();
        let h2 = h * h;
        let h3 = h2 * h;
        let mut out = h.scale(f1) + h2.scale(f2 * 0.5) + h3.scale(f3 / 6.0);
        out.coeffs[0] = f0;
        out
    }

    /// `acos` of this jet when the angle of the constant term is known
    /// independently, avoiding the ill-conditioned `acos` near `|x| = 1`.
    pub fn acos_with_angle(&self, angle: T) -> Self {
        let s = angle.sin();
        let c = angle.cos();
        let s2 = s * s;
        let s3 = s2 * s;
        let s5 = s3 * s2;
        let f1 = -(T::one() / s);
        let f2 = -(c / s3);
        let f3 = -((c * c * 2.0 + 1.0) / s5);
        self.compose_univariate(angle, f1, f2, f3)
    }

    /// Evaluate the polynomial part at a point of the input variables.
    pub fn eval(&self, x: T, y: T) -> T {
        let mut acc = T::zero();
        for (k, &(i, j)) in MONOMIALS.iter().enumerate() {
            acc = acc + self.coeffs[k] * powi(x, i) * powi(y, j);
        }
        acc
    }

    /// Substitute jets `x`, `y` for the input variables (truncated
    /// composition). The constant terms of `x` and `y` are taken as offsets
    /// from this jet's expansion point.
    pub fn compose(&self, x: &Jet3<T>, y: &Jet3<T>) -> Jet3<T> {
        let xp = [Jet3::constant(T::one()), *x, *x * *x, *x * *x * *x];
        let yp = [Jet3::constant(T::one()), *y, *y * *y, *y * *y * *y];
        let mut out = Jet3::constant(T::zero());
        for (k, &(i, j)) in MONOMIALS.iter().enumerate() {
            out = out + (xp[i as usize] * yp[j as usize]).scale(self.coeffs[k]);
        }
        out
    }
}

fn powi<T: Real>(x: T, n: u8) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl<T: Real> Add for Jet3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| self.coeffs[k] + rhs.coeffs[k]),
        }
    }
}

impl<T: Real> Sub for Jet3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| self.coeffs[k] - rhs.coeffs[k]),
        }
    }
}

impl<T: Real> Neg for Jet3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| -self.coeffs[k]),
        }
    }
}

impl<T: Real> Mul for Jet3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut coeffs = [T::zero(); N_MONOMIALS];
        for (a, &(ia, ja)) in MONOMIALS.iter().enumerate() {
            for (b, &(ib, jb)) in MONOMIALS.iter().enumerate() {
                if let Some(k) = monomial_index((ia + ib) as usize, (ja + jb) as usize) {
                    coeffs[k] = coeffs[k] + self.coeffs[a] * rhs.coeffs[b];
                }
            }
        }
        Self { coeffs }
    }
}

impl<T: Real> Div for Jet3<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let c = rhs.coeffs[0];
        let inv = T::one() / c;
        let inv2 = inv * inv;
        let inv3 = inv2 * inv;
        let inv4 = inv3 * inv;
        let recip = rhs.compose_univariate(inv, -inv2, inv3 * 2.0, -(inv4 * 6.0));
        self * recip
    }
}

macro_rules! scalar_f64_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Real> $tr<f64> for Jet3<T> {
            type Output = Self;
            fn $m(self, rhs: f64) -> Self {
                self.$m(Jet3::constant(T::from_f64(rhs)))
            }
        }
    )*};
}
scalar_f64_ops!(Add add, Sub sub, Div div);

impl<T: Real> Mul<f64> for Jet3<T> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| self.coeffs[k] * rhs),
        }
    }
}

impl<T: Real> Real for Jet3<T> {
    fn from_f64(x: f64) -> Self {
        Jet3::constant(T::from_f64(x))
    }

    fn value(&self) -> f64 {
        self.coeffs[0].value()
    }

    fn sin(self) -> Self {
        let c = self.coeffs[0];
        let (s, co) = (c.sin(), c.cos());
        self.compose_univariate(s, co, -s, -co)
    }

    fn cos(self) -> Self {
        let c = self.coeffs[0];
        let (s, co) = (c.sin(), c.cos());
        self.compose_univariate(co, -s, -co, s)
    }

    fn acos(self) -> Self {
        let angle = self.coeffs[0].acos();
        self.acos_with_angle(angle)
    }

    fn sqrt(self) -> Self {
        let c = self.coeffs[0];
        let r = c.sqrt();
        let r3 = r * c;
        let r5 = r3 * c;
        self.compose_univariate(
            r,
            T::one() / (r * 2.0),
            -(T::one() / (r3 * 4.0)),
            T::from_f64(3.0) / (r5 * 8.0),
        )
    }

    fn pi() -> Self {
        Jet3::constant(T::pi())
    }
}
