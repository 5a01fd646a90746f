//! Second-order kernels for inertial pointlike detectors with Gaussian
//! switching chi(t) = exp(-(t - t_I)^2 / 2) / sqrt(2 pi), T = 1.
//!
//! Every kernel is computed without the coupling and scaled by lambda^2 at
//! the end, so cached values serve any coupling.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use dashmap::DashMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{DetectorParams, ScenarioConfig};
use crate::specfun::{
    erf_complex, erfc_real, faddeeva, integrate_with, Envelope, QuadConfig, QuadratureResult,
    DEFAULT_REL_TOL, GAUSSIAN_CUT,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryPair {
    /// |x_I - x_J|
    pub l: f64,
    /// t_I - t_J
    pub delta: f64,
}

impl GeometryPair {
    pub fn new(l: f64, delta: f64) -> Result<Self> {
        if !l.is_finite() || l < 0.0 || !delta.is_finite() {
            return Err(Error::Domain(format!("geometry (L={l}, delta={delta})")));
        }
        Ok(GeometryPair { l, delta })
    }

    pub fn between(i: &DetectorParams, j: &DetectorParams) -> Self {
        GeometryPair { l: i.distance_to(j), delta: i.switch_peak - j.switch_peak }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixElementSet {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_cc: f64,
    pub l_ab: Complex64,
    pub l_ac: Complex64,
    pub l_bc: Complex64,
    pub m_ab: Complex64,
    pub m_ac: Complex64,
    pub m_bc: Complex64,
}

impl MatrixElementSet {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        MatrixElementSet {
            l_aa: 0.0,
            l_bb: 0.0,
            l_cc: 0.0,
            l_ab: z,
            l_ac: z,
            l_bc: z,
            m_ab: z,
            m_ac: z,
            m_bc: z,
        }
    }

    /// Multiplies every kernel by s (e.g. a ratio of squared couplings).
    pub fn scaled(&self, s: f64) -> Self {
        MatrixElementSet {
            l_aa: self.l_aa * s,
            l_bb: self.l_bb * s,
            l_cc: self.l_cc * s,
            l_ab: self.l_ab * s,
            l_ac: self.l_ac * s,
            l_bc: self.l_bc * s,
            m_ab: self.m_ab * s,
            m_ac: self.m_ac * s,
            m_bc: self.m_bc * s,
        }
    }

    /// Violated set invariants, empty when the set is consistent.
    pub fn invariant_violations(&self, rel_slack: f64) -> Vec<String> {
        let mut v = Vec::new();
        for (n, x) in [("L_AA", self.l_aa), ("L_BB", self.l_bb), ("L_CC", self.l_cc)] {
            if !(x >= 0.0) {
                v.push(format!("{n} = {x} is negative"));
            }
        }
        for (n, z, a, b) in [
            ("L_AB", self.l_ab, self.l_aa, self.l_bb),
            ("L_AC", self.l_ac, self.l_aa, self.l_cc),
            ("L_BC", self.l_bc, self.l_bb, self.l_cc),
        ] {
            if z.norm_sqr() > a * b * (1.0 + rel_slack) {
                v.push(format!("|{n}|^2 = {:e} exceeds {:e}", z.norm_sqr(), a * b));
            }
        }
        v
    }

    /// Short textual fingerprint used in sweep records.
    pub fn digest(&self) -> String {
        let all = [
            self.l_aa,
            self.l_bb,
            self.l_cc,
            self.l_ab.re,
            self.l_ab.im,
            self.l_ac.re,
            self.l_ac.im,
            self.l_bc.re,
            self.l_bc.im,
            self.m_ab.re,
            self.m_ab.im,
            self.m_ac.re,
            self.m_ac.im,
            self.m_bc.re,
            self.m_bc.im,
        ];
        // FNV-1a over the rounded decimal forms
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for x in all {
            for b in format!("{x:.11e}").bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        }
        format!("{h:016x}")
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("coupling {lambda} must be positive")))
    }
}

fn check_gap(gap: f64) -> Result<()> {
    if gap.is_finite() && gap >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gap {gap} must be non-negative")))
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Local excitation term L_II for one detector.
pub fn local_l(gap: f64, lambda: f64) -> Result<f64> {
    check_gap(gap)?;
    check_lambda(lambda)?;
    Ok(lambda * lambda * local_kernel(gap)?)
}

fn local_kernel(gap: f64) -> Result<f64> {
    // exp(-W^2) - sqrt(pi) W erfc(W) with erfc(W) = exp(-W^2) w(iW)
    let w = faddeeva(Complex64::new(0.0, gap))?.re;
    Ok((-gap * gap).exp() * (1.0 - SQRT_PI * gap * w) / (8.0 * PI * PI))
}

/// Quadrature of the momentum integral that defines the local term.
pub fn local_l_quadrature(gap: f64, lambda: f64, rel_tol: f64) -> Result<QuadratureResult> {
    check_gap(gap)?;
    check_lambda(lambda)?;
    let cfg = QuadConfig::new(rel_tol, gap + GAUSSIAN_CUT, Envelope::ShiftedGaussian { gap, scale: 0.25 / (PI * PI) });
    let mut r = integrate_with(
        |k| Complex64::new(0.5 * k * (-(gap + k) * (gap + k)).exp() / (2.0 * PI * PI), 0.0),
        &cfg,
    )?;
    let l2 = lambda * lambda;
    r.value *= l2;
    r.abs_error_estimate *= l2;
    Ok(r)
}

fn nonlocal_l_kernel(gap: f64, geom: GeometryPair, rel_tol: f64) -> Result<QuadratureResult> {
    let GeometryPair { l, delta } = geom;
    let cap = if l > 0.0 { Some(PI / (2.0 * l)) } else { None };
    let cfg = QuadConfig::new(rel_tol, gap + GAUSSIAN_CUT, Envelope::ShiftedGaussian { gap, scale: 0.25 / (PI * PI) })
        .with_panel_cap(cap);
    integrate_with(
        |k| {
            let q = gap + k;
            let phase = Complex64::from_polar((-q * q).exp(), q * delta);
            phase * (0.5 * k * sinc(k * l) / (2.0 * PI * PI))
        },
        &cfg,
    )
}

/// Non-local L_IJ by quadrature of its single momentum integral.
pub fn nonlocal_l(gap_i: f64, gap_j: f64, geom: GeometryPair, lambda: f64) -> Result<Complex64> {
    nonlocal_l_with(gap_i, gap_j, geom, lambda, DEFAULT_REL_TOL)
}

pub fn nonlocal_l_with(gap_i: f64, gap_j: f64, geom: GeometryPair, lambda: f64, rel_tol: f64) -> Result<Complex64> {
    check_gap(gap_i)?;
    check_gap(gap_j)?;
    check_lambda(lambda)?;
    let geom = GeometryPair::new(geom.l, geom.delta)?;
    if gap_i != gap_j {
        return Err(Error::Unsupported(format!("unequal gaps {gap_i} and {gap_j}")));
    }
    Ok(nonlocal_l_kernel(gap_i, geom, rel_tol)?.value * (lambda * lambda))
}

/// Closed form of L_IJ, L > 0.
///
/// lambda^2 exp(-L^2/4 - D^2/4) / (16 pi^(3/2) L) times
/// { exp(LD/2 + iWL) [i + erfi((L-D)/2 - iW)] + exp(-LD/2 - iWL) [-i + erfi((L+D)/2 + iW)] },
/// evaluated through i + erfi(z) = i exp(z^2) w(-z) and -i + erfi(z) = -i exp(z^2) w(z),
/// which folds all exponentials into exp(-W^2 + iWD).
pub fn nonlocal_l_closed(gap: f64, geom: GeometryPair, lambda: f64) -> Result<Complex64> {
    check_gap(gap)?;
    check_lambda(lambda)?;
    let GeometryPair { l, delta } = GeometryPair::new(geom.l, geom.delta)?;
    if l == 0.0 {
        return Err(Error::Domain("closed form needs L > 0; use nonlocal_l".into()));
    }
    let a = faddeeva(Complex64::new(-(l - delta) / 2.0, gap))?;
    let b = faddeeva(Complex64::new((l + delta) / 2.0, gap))?;
    let pre = Complex64::from_polar((-gap * gap).exp(), gap * delta) * I;
    Ok(pre * (a - b) * (lambda * lambda / (16.0 * PI.powf(1.5) * l)))
}

/// Literal erfi evaluation of the same closed form. Loses accuracy when
/// i + erfi(.) cancels (large gap with L <= |D|); kept for comparison.
pub fn nonlocal_l_closed_erfi(gap: f64, geom: GeometryPair, lambda: f64) -> Result<Complex64> {
    use crate::specfun::erfi_complex;
    check_gap(gap)?;
    check_lambda(lambda)?;
    let GeometryPair { l, delta } = GeometryPair::new(geom.l, geom.delta)?;
    if l == 0.0 {
        return Err(Error::Domain("closed form needs L > 0; use nonlocal_l".into()));
    }
    let t1 = Complex64::from_polar((l * delta / 2.0).exp(), gap * l)
        * (I + erfi_complex(Complex64::new((l - delta) / 2.0, -gap))?);
    let t2 = Complex64::from_polar((-l * delta / 2.0).exp(), -gap * l)
        * (-I + erfi_complex(Complex64::new((l + delta) / 2.0, gap))?);
    let env = (-l * l / 4.0 - delta * delta / 4.0).exp();
    Ok((t1 + t2) * env * (lambda * lambda / (16.0 * PI.powf(1.5) * l)))
}

/// The momentum integrand of M_IJ with its complementary error functions,
/// (k/2) exp(-k^2) sinc(kL) { e^{ikD}[1 - erf(D/2 + ik)] + e^{-ikD}[1 - erf(-D/2 + ik)] }.
///
/// The bracket grows like exp(k^2), so this is usable only for moderate k.
pub fn m_integrand_erf(k: f64, geom: GeometryPair) -> Result<Complex64> {
    let GeometryPair { l, delta } = geom;
    let one = Complex64::new(1.0, 0.0);
    let e1 = one - erf_complex(Complex64::new(delta / 2.0, k))?;
    let e2 = one - erf_complex(Complex64::new(-delta / 2.0, k))?;
    let bracket = Complex64::from_polar(1.0, k * delta) * e1 + Complex64::from_polar(1.0, -k * delta) * e2;
    Ok(bracket * (0.5 * k * (-k * k).exp() * sinc(k * l)))
}

/// The same integrand after splitting off the part that integrates in
/// closed form: k sinc(kL) exp(-k^2 - ik|D|) + i k sinc(kL) exp(-D^2/4) Im w(-k + i|D|/2).
pub fn m_integrand_split(k: f64, geom: GeometryPair) -> Result<Complex64> {
    let GeometryPair { l, delta } = geom;
    let a = delta.abs() / 2.0;
    let s = k * sinc(k * l);
    let smooth = Complex64::from_polar((-k * k).exp(), -k * delta.abs()) * s;
    let w = faddeeva(Complex64::new(-k, a))?;
    Ok(smooth + I * (s * (-a * a).exp() * w.im))
}

// Contribution of the Im w part: i exp(-a^2) int k sinc(kL) Im w(-k + ia) dk.
// With w(z) = (1/sqrt(pi)) int_0^inf exp(-t^2/4 + izt) dt the k integral
// collapses onto t = L. At L = 0 the 1/L pole is dropped and the finite
// remainder kept.
fn m_analytic_part(geom: GeometryPair) -> Complex64 {
    let b = geom.delta.abs();
    if geom.l > 0.0 {
        -I * (SQRT_PI / (2.0 * geom.l) * (-(geom.l + b) * (geom.l + b) / 4.0).exp())
    } else {
        I * (SQRT_PI * b * (-b * b / 4.0).exp() / 4.0)
    }
}

fn m_kernel(gap: f64, geom: GeometryPair, rel_tol: f64) -> Result<Complex64> {
    let GeometryPair { l, delta } = geom;
    let b = delta.abs();
    let cap = if l > 0.0 { Some(PI / (2.0 * l)) } else { None };
    let cfg = QuadConfig::new(rel_tol, GAUSSIAN_CUT, Envelope::Gaussian { scale: 1.0 }).with_panel_cap(cap);
    let q = integrate_with(|k| Complex64::from_polar((-k * k).exp(), -k * b) * (k * sinc(k * l)), &cfg)?;
    Ok((q.value + m_analytic_part(geom)) * (-(-gap * gap).exp() / (4.0 * PI * PI)))
}

fn m_phase(gap: f64, t_i: f64, t_j: f64) -> Complex64 {
    Complex64::from_polar(1.0, gap * (t_i + t_j))
}

/// Non-local M_IJ; the smooth part by quadrature, the rest analytically.
/// Detectors at the same point (L = 0) get the finite part of the
/// otherwise divergent integral.
pub fn m_element(gap: f64, t_i: f64, t_j: f64, geom: GeometryPair, lambda: f64) -> Result<Complex64> {
    m_element_with(gap, t_i, t_j, geom, lambda, DEFAULT_REL_TOL)
}

pub fn m_element_with(gap: f64, t_i: f64, t_j: f64, geom: GeometryPair, lambda: f64, rel_tol: f64) -> Result<Complex64> {
    check_gap(gap)?;
    check_lambda(lambda)?;
    let geom = GeometryPair::new(geom.l, geom.delta)?;
    if !t_i.is_finite() || !t_j.is_finite() {
        return Err(Error::Domain("switching peaks must be finite".into()));
    }
    Ok(m_kernel(gap, geom, rel_tol)? * m_phase(gap, t_i, t_j) * (lambda * lambda))
}

/// M_IJ with the smooth integral also in closed form. Cross-check only.
pub fn m_element_closed(gap: f64, t_i: f64, t_j: f64, geom: GeometryPair, lambda: f64) -> Result<Complex64> {
    check_gap(gap)?;
    check_lambda(lambda)?;
    let GeometryPair { l, delta } = GeometryPair::new(geom.l, geom.delta)?;
    let b = delta.abs();
    let q = if l > 0.0 {
        let w1 = faddeeva(Complex64::new((l - b) / 2.0, 0.0))?;
        let w2 = faddeeva(Complex64::new(-(l + b) / 2.0, 0.0))?;
        (w1 - w2) * (SQRT_PI / (4.0 * l)) * -I
    } else {
        Complex64::new(0.5, 0.0) - I * (SQRT_PI * b / 4.0) * faddeeva(Complex64::new(-b / 2.0, 0.0))?
    };
    let k = (q + m_analytic_part(GeometryPair { l, delta })) * (-(-gap * gap).exp() / (4.0 * PI * PI));
    Ok(k * m_phase(gap, t_i, t_j) * (lambda * lambda))
}

/// Check value for the local term, erfc taken on the real line.
pub fn local_l_erfc(gap: f64, lambda: f64) -> Result<f64> {
    check_gap(gap)?;
    check_lambda(lambda)?;
    let v = (-gap * gap).exp() - SQRT_PI * gap * erfc_real(gap)?;
    Ok(lambda * lambda * v / (8.0 * PI * PI))
}

// ---------------------------------------------------------------------------
// cache

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
struct CacheKey {
    kind: u8,
    parts: [u64; 4],
}

fn round12(x: f64) -> u64 {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    // fold -0 into 0
    if r == 0.0 { 0 } else { r.to_bits() }
}

impl CacheKey {
    fn new(kind: u8, a: f64, b: f64, c: f64, tol: f64) -> Self {
        CacheKey { kind, parts: [round12(a), round12(b), round12(c), round12(tol)] }
    }
}

/// Coupling-free kernels keyed on parameters rounded to 12 significant
/// digits. Safe to share between threads.
#[derive(Debug, Default)]
pub struct ElementCache {
    map: DashMap<CacheKey, Complex64>,
    dir: Option<PathBuf>,
}

const CACHE_FILE: &str = "harvestlab-elements.json";

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    key: CacheKey,
    value: Complex64,
}

impl ElementCache {
    pub fn new() -> Self {
        ElementCache::default()
    }

    /// A cache backed by `dir`, pre-loaded from it when a file exists.
    pub fn with_dir(dir: &Path) -> Result<Self> {
        let cache = ElementCache { map: DashMap::new(), dir: Some(dir.to_path_buf()) };
        let path = dir.join(CACHE_FILE);
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let entries: Vec<CacheEntry> =
                serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            for e in entries {
                cache.map.insert(e.key, e.value);
            }
        }
        Ok(cache)
    }

    /// Reads HARVESTLAB_CACHE_DIR; in-memory only when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os("HARVESTLAB_CACHE_DIR") {
            Some(d) if !d.is_empty() => {
                let dir = PathBuf::from(d);
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                ElementCache::with_dir(&dir)
            }
            _ => Ok(ElementCache::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Writes the cache file if the cache has a directory.
    pub fn persist(&self) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let sorted: BTreeMap<CacheKey, Complex64> = self.map.iter().map(|e| (*e.key(), *e.value())).collect();
        let entries: Vec<CacheEntry> = sorted.into_iter().map(|(key, value)| CacheEntry { key, value }).collect();
        let text = serde_json::to_string(&entries).map_err(|e| Error::Io(e.to_string()))?;
        let path = dir.join(CACHE_FILE);
        let tmp = dir.join(format!("{CACHE_FILE}.tmp"));
        std::fs::write(&tmp, text).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    fn get_or<F: FnOnce() -> Result<Complex64>>(&self, key: CacheKey, f: F) -> Result<Complex64> {
        if let Some(v) = self.map.get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        // racing writers compute the same value; first one wins
        Ok(*self.map.entry(key).or_insert(v))
    }
}

/// Process-wide cache, configured from the environment on first use.
pub fn global_cache() -> &'static ElementCache {
    static CACHE: OnceLock<ElementCache> = OnceLock::new();
    CACHE.get_or_init(|| ElementCache::from_env().unwrap_or_default())
}

#[derive(Debug, Clone, Copy)]
pub struct ElementOptions<'a> {
    pub rel_tol: f64,
    pub cache: Option<&'a ElementCache>,
}

impl Default for ElementOptions<'_> {
    fn default() -> Self {
        ElementOptions { rel_tol: DEFAULT_REL_TOL, cache: Some(global_cache()) }
    }
}

/// All nine kernels of a scenario at the default tolerance.
pub fn element_set(cfg: &ScenarioConfig) -> Result<MatrixElementSet> {
    element_set_with(cfg, &ElementOptions::default())
}

pub fn element_set_with(cfg: &ScenarioConfig, opts: &ElementOptions<'_>) -> Result<MatrixElementSet> {
    check_lambda(cfg.coupling)?;
    let l2 = cfg.coupling * cfg.coupling;
    let tol = opts.rel_tol;

    let cached = |key: CacheKey, f: &dyn Fn() -> Result<Complex64>| -> Result<Complex64> {
        match opts.cache {
            Some(c) => c.get_or(key, f),
            None => f(),
        }
    };

    let local = |d: &DetectorParams| -> Result<f64> {
        let gap = d.gap;
        check_gap(gap)?;
        Ok(cached(CacheKey::new(0, gap, 0.0, 0.0, 0.0), &|| Ok(Complex64::new(local_kernel(gap)?, 0.0)))?.re * l2)
    };
    let lnl = |i: &DetectorParams, j: &DetectorParams| -> Result<Complex64> {
        if i.gap != j.gap {
            return Err(Error::Unsupported(format!("unequal gaps {} and {}", i.gap, j.gap)));
        }
        let g = GeometryPair::between(i, j);
        let gap = i.gap;
        Ok(cached(CacheKey::new(1, gap, g.l, g.delta, tol), &|| Ok(nonlocal_l_kernel(gap, g, tol)?.value))? * l2)
    };
    let m = |i: &DetectorParams, j: &DetectorParams| -> Result<Complex64> {
        if i.gap != j.gap {
            return Err(Error::Unsupported(format!("unequal gaps {} and {}", i.gap, j.gap)));
        }
        let g = GeometryPair::between(i, j);
        let gap = i.gap;
        let k = cached(CacheKey::new(2, gap, g.l, g.delta.abs(), tol), &|| m_kernel(gap, g, tol))?;
        Ok(k * m_phase(gap, i.switch_peak, j.switch_peak) * l2)
    };

    let (a, b, c) = (&cfg.det_a, &cfg.det_b, &cfg.det_c);
    Ok(MatrixElementSet {
        l_aa: local(a).map_err(|e| e.in_pair("AA"))?,
        l_bb: local(b).map_err(|e| e.in_pair("BB"))?,
        l_cc: local(c).map_err(|e| e.in_pair("CC"))?,
        l_ab: lnl(a, b).map_err(|e| e.in_pair("AB"))?,
        l_ac: lnl(a, c).map_err(|e| e.in_pair("AC"))?,
        l_bc: lnl(b, c).map_err(|e| e.in_pair("BC"))?,
        m_ab: m(a, b).map_err(|e| e.in_pair("AB"))?,
        m_ac: m(a, c).map_err(|e| e.in_pair("AC"))?,
        m_bc: m(b, c).map_err(|e| e.in_pair("BC"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_at_zero_gap() {
        let v = local_l(0.0, 1.0).unwrap();
        assert!((v - 1.0 / (8.0 * PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn local_routes_agree() {
        for g in [0.0, 0.1, 1.0, 2.5, 5.0] {
            let a = local_l(g, 1.0).unwrap();
            let b = local_l_erfc(g, 1.0).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn local_limit_of_nonlocal() {
        let g = GeometryPair::new(0.0, 0.0).unwrap();
        let a = nonlocal_l(1.0, 1.0, g, 0.1).unwrap();
        let b = local_l(1.0, 0.1).unwrap();
        assert!((a.re / b - 1.0).abs() < 1e-9 && a.im.abs() < 1e-12 * b);
    }

    #[test]
    fn unequal_gaps_are_unsupported() {
        let g = GeometryPair::new(1.0, 0.0).unwrap();
        assert!(matches!(nonlocal_l(1.0, 2.0, g, 0.1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_needs_separation() {
        let g = GeometryPair::new(0.0, 1.0).unwrap();
        assert!(matches!(nonlocal_l_closed(1.0, g, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn split_integrand_matches_erf_integrand() {
        for (k, l, d) in [(0.7, 0.0, 1.3), (1.9, 2.5, -2.2), (0.3, 5.0, 4.0), (2.5, 1.0, 0.0)] {
            let g = GeometryPair { l, delta: d };
            let a = m_integrand_erf(k, g).unwrap();
            let b = m_integrand_split(k, g).unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-3), "{k} {l} {d}: {a} {b}");
        }
    }

    #[test]
    fn m_quadrature_matches_closed() {
        for (l, d) in [(0.0, 0.0), (0.0, 5.0), (2.5, 0.0), (2.5, 3.0), (5.0, 10.0), (10.0, 1.0)] {
            let g = GeometryPair { l, delta: d };
            let a = m_element(2.5, 0.3, -1.0, g, 1.0).unwrap();
            let b = m_element_closed(2.5, 0.3, -1.0, g, 1.0).unwrap();
            assert!((a - b).norm() <= 1e-8 * b.norm(), "{l} {d}: {a} {b}");
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("harvestlab-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let c = ElementCache::with_dir(&dir).unwrap();
        let key = CacheKey::new(1, 2.5, 5.0, 0.0, 1e-9);
        let v = c.get_or(key, || Ok(Complex64::new(1.5, -2.0))).unwrap();
        c.persist().unwrap();
        let d = ElementCache::with_dir(&dir).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get_or(key, || Ok(Complex64::new(0.0, 0.0))).unwrap(), v);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rounding_merges_nearby_keys() {
        assert_eq!(round12(2.5), round12(2.5 + 1e-14));
        assert_ne!(round12(2.5), round12(2.5 + 1e-9));
        assert_eq!(round12(-0.0), round12(0.0));
    }
}
