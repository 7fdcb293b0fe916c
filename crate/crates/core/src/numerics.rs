//! Small numerical helpers: bisection and Richardson extrapolation.

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !(fa * fb < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

/// Value at `x = 0` of the interpolating polynomial through `(xs[i], ys[i])`
/// (Neville's scheme). With `xs` a geometric ladder this is Richardson
/// extrapolation for an error expansion in integer powers of `x`.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut p = ys.to_vec();
    let m = xs.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xa, xb) = (xs[i], xs[i + level]);
            p[i] = (xb * p[i] - xa * p[i + 1]) / (xb - xa);
        }
    }
    *p.first().unwrap_or(&f64::NAN)
}

/// Extrapolate `values[i] = F(h / ratio^i)` to `h -> 0`, assuming an error
/// expansion `h, h², …`.
pub fn richardson(values: &[f64], ratio: f64) -> f64 {
    let xs: Vec<f64> = (0..values.len()).map(|i| ratio.powi(-(i as i32))).collect();
    extrapolate_to_zero(&xs, values)
}

/// Like [`richardson`] but for an even expansion `h², h⁴, …`.
pub fn richardson_even(values: &[f64], ratio: f64) -> f64 {
    let xs: Vec<f64> = (0..values.len()).map(|i| ratio.powi(-2 * i as i32)).collect();
    extrapolate_to_zero(&xs, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn richardson_cancels_polynomial_error() {
        let f = |h: f64| 3.0 + 2.0 * h - 5.0 * h * h;
        let v: Vec<f64> = (0..3).map(|i| f(0.1 / 2f64.powi(i))).collect();
        assert!((richardson(&v, 2.0) - 3.0).abs() < 1e-13);
        let g = |h: f64| 1.0 + h * h + h.powi(4);
        let w: Vec<f64> = (0..3).map(|i| g(0.1 / 2f64.powi(i))).collect();
        assert!((richardson_even(&w, 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn neville_on_uneven_nodes() {
        let f = |x: f64| 0.5 - x + 4.0 * x * x;
        let xs = [0.3, 0.1, 0.17];
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 0.5).abs() < 1e-14);
    }
}
