//! Faddeeva function w(z) = exp(-z^2) erfc(-iz).
//!
//! Poppe & Wijers' three-branch scheme: a power series inside a small
//! ellipse around the origin, a truncated Laplace continued fraction
//! combined with a Taylor sum in the intermediate band, and the plain
//! continued fraction far out. The lower half plane is reached through
//! w(z) = 2 exp(-z^2) - w(-z).

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const MAX_EXP: f64 = 708.503_061_461_606;
const MAX_GONI: f64 = 3.537_118_876_014_22e15;

/// w(z) for finite z.
///
/// Fails with a domain error for non-finite input and when the reflected
/// value in the lower half plane would overflow.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("faddeeva: non-finite argument {z}")));
    }
    let xi = z.re;
    let yi = z.im;
    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;

    let mut qrho = x * x + y * y;
    let mut xquad = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let series = qrho < 0.085264;
    let (mut u, mut v);
    // carried into the reflection step when the series branch was used
    let (mut u2, mut v2) = (0.0, 0.0);

    if series {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i64;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0i64;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i64;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i64;
            nu = (16.0 + 26.0 * qrho).round() as i64;
        }
        let h2 = 2.0 * h;
        let taylor = h > 0.0;
        let mut qlambda = if taylor { h2.powi(kapn as i32) } else { 0.0 };

        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if taylor && n <= kapn {
                let t = qlambda + sx;
                sx = rx * t - ry * sy;
                sy = ry * t + rx * sy;
                qlambda /= h2;
            }
        }
        if h == 0.0 {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        } else {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < 0.0 {
        if series {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            if yquad > MAX_GONI || xquad > MAX_EXP {
                return Err(Error::Domain(format!("faddeeva: overflow at {z}")));
            }
            let w1 = 2.0 * xquad.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    Ok(Complex64::new(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_is_one() {
        assert_eq!(faddeeva(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn imaginary_axis_is_real() {
        for y in [0.1, 0.7, 2.0, 5.5, 12.0, 29.0] {
            let w = faddeeva(c(0.0, y)).unwrap();
            assert_eq!(w.im, 0.0);
            assert!(w.re > 0.0);
        }
    }

    #[test]
    fn real_axis_real_part_is_gaussian() {
        for x in [0.3, 1.0, 3.0, 7.0] {
            let w = faddeeva(c(x, 0.0)).unwrap();
            assert!((w.re - (-x * x).exp()).abs() <= 1e-15 * (-x * x).exp().max(1e-300));
        }
    }

    #[test]
    fn rejects_nan() {
        assert!(faddeeva(c(f64::NAN, 0.0)).is_err());
        assert!(faddeeva(c(0.0, f64::INFINITY)).is_err());
    }
}
