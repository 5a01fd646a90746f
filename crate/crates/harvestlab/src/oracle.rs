//! Double-double reference evaluations of w, erf and erfc.
//!
//! Slow and independent of the production code path: Taylor series of
//! w(z) = sum (iz)^n / Gamma(n/2 + 1) near the origin, Laplace continued
//! fraction farther out, both carried in ~32 significant digits.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let d = quick_two_sum(s, e + t);
        quick_two_sum(d.hi, d.lo + f)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::new(q3))
    }

    fn sqrt(self) -> Dd {
        let s = Dd::new(self.hi.sqrt());
        // one Newton step doubles the 53 correct bits
        s.add(self.sub(s.mul(s)).div(s.add(s)))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn from(z: Complex64) -> Cdd {
        Cdd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn scale(self, s: Dd) -> Cdd {
        Cdd { re: self.re.mul(s), im: self.im.mul(s) }
    }

    fn recip(self) -> Cdd {
        let d = self.re.mul(self.re).add(self.im.mul(self.im));
        Cdd { re: self.re.div(d), im: self.im.neg().div(d) }
    }

    fn norm_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

fn sqrt_pi() -> Dd {
    Dd { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 }.sqrt()
}

/// Radius inside which the Taylor series is used.
pub const TAYLOR_RADIUS: f64 = 6.0;

/// Power series of w about the origin, usable anywhere in |z| <= 6.
pub fn faddeeva_taylor(z: Complex64) -> Complex64 {
    let u = Cdd::from(Complex64::new(-z.im, z.re));
    let mut even = Dd::new(1.0);
    let mut odd = Dd::new(2.0).div(sqrt_pi());
    let mut power = Cdd::from(Complex64::new(1.0, 0.0));
    let mut sum = Cdd { re: Dd::ZERO, im: Dd::ZERO };
    let min_terms = (2.0 * z.norm_sqr()) as usize + 10;
    for n in 0..2000usize {
        let c = if n % 2 == 0 { even } else { odd };
        let term = power.scale(c);
        sum = sum.add(term);
        if n > min_terms && term.norm_f64() < 1e-34 * sum.norm_f64().max(1e-300) {
            break;
        }
        power = power.mul(u);
        // 1/Gamma(n/2 + 2) from 1/Gamma(n/2 + 1)
        if n % 2 == 0 {
            even = even.mul(Dd::new(2.0)).div(Dd::new((n + 2) as f64));
        } else {
            odd = odd.mul(Dd::new(2.0)).div(Dd::new((n + 2) as f64));
        }
    }
    sum.to_c64()
}

/// Laplace continued fraction, for Im z >= 0 away from the origin.
pub fn faddeeva_cf(z: Complex64, depth: usize) -> Complex64 {
    let zz = Cdd::from(z);
    let mut f = zz;
    for k in (1..=depth).rev() {
        let a = Dd::new(k as f64 * 0.5);
        f = zz.sub(f.recip().scale(a));
    }
    // i / (sqrt(pi) f)
    let r = f.recip().scale(Dd::new(1.0).div(sqrt_pi()));
    Cdd { re: r.im.neg(), im: r.re }.to_c64()
}

/// Reference w(z): the series inside |z| <= 6 and the continued fraction
/// in the upper half plane outside it.
pub fn faddeeva_ref(z: Complex64) -> Option<Complex64> {
    if z.norm() <= TAYLOR_RADIUS {
        Some(faddeeva_taylor(z))
    } else if z.im >= 0.0 {
        Some(faddeeva_cf(z, 4000))
    } else {
        None
    }
}

/// Maclaurin series of erf in double-double, |z| <= 6.
pub fn erf_taylor(z: Complex64) -> Complex64 {
    let zz = Cdd::from(z);
    let z2 = zz.mul(zz);
    let mut power = zz;
    let mut fact = Dd::new(1.0);
    let mut sum = zz;
    let min_terms = z.norm_sqr() as usize + 10;
    for n in 1..2000usize {
        power = power.mul(z2);
        fact = fact.mul(Dd::new(n as f64));
        let mut term = power.scale(Dd::new(1.0).div(fact.mul(Dd::new((2 * n + 1) as f64))));
        if n % 2 == 1 {
            term = Cdd { re: term.re.neg(), im: term.im.neg() };
        }
        sum = sum.add(term);
        if n > min_terms && term.norm_f64() < 1e-34 * sum.norm_f64().max(1e-300) {
            break;
        }
    }
    sum.scale(Dd::new(2.0).div(sqrt_pi())).to_c64()
}

/// Reference erf(z). Beyond the series radius it needs Re z >= 0 so that
/// iz stays in the upper half plane; odd symmetry covers the rest.
pub fn erf_ref(z: Complex64) -> Option<Complex64> {
    if z.norm() <= TAYLOR_RADIUS {
        return Some(erf_taylor(z));
    }
    let (s, zp) = if z.re >= 0.0 { (1.0, z) } else { (-1.0, -z) };
    let w = faddeeva_ref(Complex64::new(-zp.im, zp.re))?;
    Some(s * (Complex64::new(1.0, 0.0) - (-zp * zp).exp() * w))
}

/// Reference erfc(x) for real x >= 0 from the continued fraction of w(ix).
pub fn erfc_ref(x: f64) -> f64 {
    let w = if x <= TAYLOR_RADIUS {
        faddeeva_taylor(Complex64::new(0.0, x))
    } else {
        faddeeva_cf(Complex64::new(0.0, x), 4000)
    };
    (-x * x).exp() * w.re
}
