//! Adaptive Gauss-Kronrod (7/15) quadrature over [0, k_cut] with an
//! analytic bound for the discarded Gaussian tail.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Bound on |f(k)| beyond the cut, used for the tail term of the error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// |f(k)| <= scale * k * exp(-(gap + k)^2)
    ShiftedGaussian { gap: f64, scale: f64 },
    /// |f(k)| <= scale * k * exp(-k^2)
    Gaussian { scale: f64 },
}

impl Envelope {
    /// Upper bound on the integral of |f| over [k_cut, inf).
    pub fn tail_bound(&self, k_cut: f64) -> f64 {
        match *self {
            // k <= gap + k, and (gap+k) exp(-(gap+k)^2) integrates to exp(-(gap+k_cut)^2)/2
            Envelope::ShiftedGaussian { gap, scale } => {
                scale * 0.5 * (-(gap + k_cut) * (gap + k_cut)).exp()
            }
            Envelope::Gaussian { scale } => scale * 0.5 * (-k_cut * k_cut).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub k_cut: f64,
    pub envelope: Envelope,
    /// Largest allowed panel width, e.g. pi/(2L) for sinc(kL) integrands.
    pub panel_cap: Option<f64>,
    pub max_panels: usize,
}

impl QuadConfig {
    pub fn new(rel_tol: f64, k_cut: f64, envelope: Envelope) -> Self {
        QuadConfig {
            rel_tol,
            k_cut,
            envelope,
            panel_cap: None,
            max_panels: 4000,
        }
    }

    pub fn with_panel_cap(mut self, cap: Option<f64>) -> Self {
        self.panel_cap = cap;
        self
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kron += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Panel {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).norm(),
        resabs: resabs * half.abs(),
    }
}

/// Integrates f over [0, inf) as [0, k_cut] plus a bounded tail.
pub fn integrate_semi_infinite<F: Fn(f64) -> Complex64>(
    f: F,
    rel_tol: f64,
    k_cut: f64,
    envelope: Envelope,
) -> Result<QuadratureResult> {
    integrate_with(f, &QuadConfig::new(rel_tol, k_cut, envelope))
}

pub fn integrate_with<F: Fn(f64) -> Complex64>(f: F, cfg: &QuadConfig) -> Result<QuadratureResult> {
    if !(cfg.rel_tol > 1e-14 && cfg.rel_tol < 1e-2) {
        return Err(Error::Domain(format!(
            "rel_tol {} outside (1e-14, 1e-2)",
            cfg.rel_tol
        )));
    }
    if !(cfg.k_cut > 0.0 && cfg.k_cut.is_finite()) {
        return Err(Error::Domain(format!("k_cut {} must be positive", cfg.k_cut)));
    }
    let mut width = 1.0f64.min(cfg.k_cut);
    if let Some(cap) = cfg.panel_cap {
        if cap > 0.0 && cap.is_finite() {
            width = width.min(cap);
        }
    }
    let n0 = (cfg.k_cut / width).ceil().max(1.0) as usize;
    let step = cfg.k_cut / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let a = step * i as f64;
            let b = if i + 1 == n0 { cfg.k_cut } else { step * (i + 1) as f64 };
            gk15(&f, a, b)
        })
        .collect();
    let tail = cfg.envelope.tail_bound(cfg.k_cut);
    let min_width = step * 2f64.powi(-40);

    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let quad_err: f64 = panels.iter().map(|p| p.error).sum();
        let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        let roundoff = 50.0 * f64::EPSILON * resabs;
        let evaluations = 15 * panels.len() + 15 * (panels.len() - n0);
        let total_err = quad_err + tail;
        if total_err <= (cfg.rel_tol * value.norm()).max(roundoff) {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: total_err.max(roundoff),
                evaluations,
            });
        }
        // the tail alone cannot be reduced by subdividing
        if tail > cfg.rel_tol * value.norm() && tail > roundoff && quad_err <= roundoff {
            return Err(Error::Convergence {
                best: value,
                abs_error: total_err,
                evaluations,
            });
        }
        let (idx, worst) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = &panels[idx];
        if panels.len() >= cfg.max_panels || (p.b - p.a) < min_width || worst <= 0.0 {
            return Err(Error::Convergence {
                best: value,
                abs_error: total_err,
                evaluations,
            });
        }
        let (a, b) = (p.a, p.b);
        let mid = 0.5 * (a + b);
        let left = gk15(&f, a, mid);
        let right = gk15(&f, mid, b);
        panels[idx] = left;
        panels.insert(idx + 1, right);
    }
}
