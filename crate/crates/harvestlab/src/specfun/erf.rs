use num_complex::Complex64;

use super::faddeeva::faddeeva;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

// Below this modulus the Maclaurin series is used; 1 - exp(-z^2) w(iz)
// cancels badly near the origin.
const SERIES_RADIUS: f64 = 0.5;

fn check(z: Complex64, name: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name}: non-finite argument {z}")))
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..40 {
        term = -term * z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}

/// erf(z) for complex z.
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    check(z, "erf")?;
    if z.norm() < SERIES_RADIUS {
        return Ok(erf_series(z));
    }
    if z.re < 0.0 {
        return Ok(-erf_complex(-z)?);
    }
    // Re z >= 0 keeps iz in the closed upper half plane.
    let w = faddeeva(I * z)?;
    Ok(Complex64::new(1.0, 0.0) - (-z * z).exp() * w)
}

/// erfc(z) = 1 - erf(z) for complex z, without the cancellation of the
/// subtraction when erf(z) is close to 1.
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    check(z, "erfc")?;
    if z.norm() < SERIES_RADIUS {
        return Ok(Complex64::new(1.0, 0.0) - erf_series(z));
    }
    if z.re >= 0.0 {
        Ok((-z * z).exp() * faddeeva(I * z)?)
    } else {
        Ok(Complex64::new(2.0, 0.0) - (-z * z).exp() * faddeeva(-I * z)?)
    }
}

/// erfi(z) = -i erf(iz).
pub fn erfi_complex(z: Complex64) -> Result<Complex64> {
    check(z, "erfi")?;
    Ok(-I * erf_complex(I * z)?)
}

/// Complementary error function on the real line.
pub fn erfc_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("erfc: non-finite argument {x}")));
    }
    if x >= 0.0 {
        // w(ix) = exp(x^2) erfc(x) is real on the positive imaginary axis
        Ok((-x * x).exp() * faddeeva(Complex64::new(0.0, x))?.re)
    } else {
        Ok(2.0 - erfc_real(-x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_zero() {
        assert_eq!(erf_complex(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(erfi_complex(Complex64::new(0.0, 0.0)).unwrap().norm(), 0.0);
    }

    #[test]
    fn erfc_reflection() {
        for x in [0.0, 0.2, 1.3, 4.0, 9.5] {
            let s = erfc_real(x).unwrap() + erfc_real(-x).unwrap();
            assert!((s - 2.0).abs() < 1e-15);
        }
        assert_eq!(erfc_real(0.0).unwrap(), 1.0);
    }

    #[test]
    fn erfi_real_on_real_axis() {
        for x in [-3.0, -0.4, 0.3, 2.0] {
            let v = erfi_complex(Complex64::new(x, 0.0)).unwrap();
            assert!(v.im.abs() <= 1e-15 * v.re.abs());
        }
    }

    #[test]
    fn series_and_faddeeva_routes_meet() {
        for z in [
            Complex64::new(0.49, 0.0),
            Complex64::new(0.3, 0.38),
            Complex64::new(-0.1, 0.48),
        ] {
            let a = erf_series(z);
            let b = Complex64::new(1.0, 0.0) - (-z * z).exp() * faddeeva(I * z).unwrap();
            let b = if z.re < 0.0 {
                -(Complex64::new(1.0, 0.0) - (-z * z).exp() * faddeeva(-I * z).unwrap())
            } else {
                b
            };
            assert!((a - b).norm() <= 1e-13 * a.norm(), "{z}: {a} vs {b}");
        }
    }
}
