//! Two-detector density matrices in the basis {gg, ge, eg, ee}
//! (first letter detector A). Indices below are zero-based.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_elements::MatrixElementSet;
use crate::protocol::{classify_regime, MeasurementKind, Regime, ScenarioConfig};

pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn zeros() -> Mat4 {
    [[ZERO; 4]; 4]
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn add(a: &Mat4, b: &Mat4, s: f64) -> Mat4 {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += b[i][j] * s;
        }
    }
    out
}

fn scale(a: &Mat4, s: f64) -> Mat4 {
    add(&zeros(), a, s)
}

pub fn trace(m: &Mat4) -> Complex64 {
    (0..4).map(|i| m[i][i]).sum()
}

/// Largest |m_ij - conj(m_ji)|.
pub fn hermitian_defect(m: &Mat4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub matrix: Mat4,
    pub regime: Regime,
    /// Perturbative order kept in the assembly.
    pub order_note: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeElements {
    pub lt_aa: f64,
    pub lt_bb: f64,
    pub lt_ab: Complex64,
    pub mt_ab: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimedElements {
    pub lp_a: Complex64,
    pub lp_b: Complex64,
    pub lp_aa: f64,
    pub lp_bb: f64,
    pub lp_ab: Complex64,
    pub mp_ab: Complex64,
}

// Block with the layout shared by rho2 and nu.
fn harvesting_block(l_aa: f64, l_bb: f64, l_ab: Complex64, m_ab: Complex64) -> Mat4 {
    let mut m = zeros();
    m[0][0] = re(-l_aa - l_bb);
    m[1][1] = re(l_bb);
    m[2][2] = re(l_aa);
    m[2][1] = l_ab;
    m[1][2] = l_ab.conj();
    m[3][0] = m_ab;
    m[0][3] = m_ab.conj();
    m
}

pub fn rho0() -> Mat4 {
    let mut m = zeros();
    m[0][0] = re(1.0);
    m
}

pub fn rho2_block(e: &MatrixElementSet) -> Mat4 {
    harvesting_block(e.l_aa, e.l_bb, e.l_ab, e.m_ab)
}

/// Lower-triangle entries of gamma before the eps sqrt(1 - eps^2) factor,
/// as (row eg <- A side, row ge <- B side).
pub fn gamma_entries(e: &MatrixElementSet, xi: f64) -> (Complex64, Complex64) {
    let p = Complex64::from_polar(1.0, xi);
    let a = p * e.m_ac + p.conj() * e.l_ac;
    let b = p * e.m_bc + p.conj() * e.l_bc;
    (a, b)
}

/// The A-side term sits in row |e_A g_B> (index 2), the B-side term in
/// row |g_A e_B> (index 1).
pub fn gamma_block(e: &MatrixElementSet, epsilon: f64, xi: f64) -> Mat4 {
    let pre = epsilon * (1.0 - epsilon * epsilon).max(0.0).sqrt();
    let (a, b) = gamma_entries(e, xi);
    let mut m = zeros();
    m[2][0] = a * pre;
    m[1][0] = b * pre;
    m[0][2] = m[2][0].conj();
    m[0][1] = m[1][0].conj();
    m
}

fn require_lcc(e: &MatrixElementSet) -> Result<()> {
    if e.l_cc > 0.0 {
        Ok(())
    } else {
        Err(Error::Degenerate(format!("L_CC = {} leaves the orthogonal outcome undefined", e.l_cc)))
    }
}

pub fn tilde_elements(e: &MatrixElementSet) -> Result<TildeElements> {
    require_lcc(e)?;
    Ok(dressed(e, e.l_cc))
}

fn dressed(e: &MatrixElementSet, den: f64) -> TildeElements {
    TildeElements {
        lt_aa: e.l_aa + (e.l_ac.norm_sqr() + e.m_ac.norm_sqr()) / den,
        lt_bb: e.l_bb + (e.l_bc.norm_sqr() + e.m_bc.norm_sqr()) / den,
        lt_ab: e.l_ab + (e.l_ac * e.l_bc.conj() + e.m_ac * e.m_bc.conj()) / den,
        mt_ab: e.m_ab + (e.l_ac * e.m_bc + e.l_bc * e.m_ac) / den,
    }
}

pub fn nu_block(e: &MatrixElementSet) -> Result<Mat4> {
    let t = tilde_elements(e)?;
    Ok(scale(&harvesting_block(t.lt_aa, t.lt_bb, t.lt_ab, t.mt_ab), e.l_cc))
}

pub fn primed_elements(e: &MatrixElementSet, epsilon: f64, xi: f64) -> Result<PrimedElements> {
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} must be non-negative")));
    }
    let den = epsilon * epsilon + e.l_cc;
    if !(den > 0.0) {
        return Err(Error::Degenerate("eps^2 + L_CC vanishes".into()));
    }
    let p = Complex64::from_polar(1.0, xi);
    let s = epsilon / den;
    let d = dressed(e, den);
    Ok(PrimedElements {
        lp_a: (p.conj() * e.m_ac.conj() + p * e.l_ac.conj()) * s,
        lp_b: (p.conj() * e.m_bc.conj() + p * e.l_bc.conj()) * s,
        lp_aa: d.lt_aa,
        lp_bb: d.lt_bb,
        lp_ab: d.lt_ab,
        mp_ab: d.mt_ab,
    })
}

/// Leading-order probability of the selective outcome.
pub fn outcome_probability(e: &MatrixElementSet, epsilon: f64) -> f64 {
    let e2 = epsilon * epsilon;
    (e2 + e.l_cc * (1.0 - 2.0 * e2)).clamp(0.0, 1.0)
}

fn repair_trace(m: &mut Mat4) {
    let rest = m[1][1].re + m[2][2].re + m[3][3].re;
    m[0][0] = re(1.0 - rest);
    for i in 0..4 {
        m[i][i].im = 0.0;
    }
}

fn state_for(regime: Regime, e: &MatrixElementSet, epsilon: f64, xi: f64, gamma_sign: f64) -> Result<Mat4> {
    let base = add(&rho0(), &rho2_block(e), 1.0);
    let gamma = || scale(&gamma_block(e, epsilon, xi), gamma_sign);
    let mut m = match regime {
        Regime::Baseline | Regime::NonSelective => base,
        Regime::NonOrthogonal => {
            if !(epsilon > 0.0) {
                return Err(Error::Degenerate("non-orthogonal state needs epsilon > 0".into()));
            }
            let e2 = epsilon * epsilon;
            add(&base, &gamma(), 1.0 / e2 - e.l_cc / (e2 * e2))
        }
        Regime::Orthogonal => {
            let nu = nu_block(e)?;
            add(&rho0(), &add(&gamma(), &nu, 1.0), 1.0 / e.l_cc)
        }
        Regime::Transition => {
            let e2 = epsilon * epsilon;
            let den = e2 + e.l_cc;
            if !(den > 0.0) {
                return Err(Error::Degenerate("eps^2 + L_CC vanishes".into()));
            }
            let num = add(&add(&gamma(), &nu_block_or_zero(e)?, 1.0), &rho2_block(e), e2);
            add(&rho0(), &num, 1.0 / den)
        }
    };
    repair_trace(&mut m);
    Ok(m)
}

// nu carries a factor L_CC, so it is simply absent when L_CC = 0.
fn nu_block_or_zero(e: &MatrixElementSet) -> Result<Mat4> {
    if e.l_cc == 0.0 {
        Ok(zeros())
    } else {
        nu_block(e)
    }
}

/// State under the scenario's own regime (override or classification).
pub fn assemble_state(cfg: &ScenarioConfig, e: &MatrixElementSet) -> Result<TwoQubitState> {
    assemble_regime(cfg, e, cfg.regime()?)
}

/// State under an explicitly requested regime.
///
/// Baseline and NonSelective are always available. A selective regime
/// needs a selective measurement, and without an override it must agree
/// with the point-wise classification.
pub fn assemble_regime(cfg: &ScenarioConfig, e: &MatrixElementSet, regime: Regime) -> Result<TwoQubitState> {
    assemble_with_gamma_sign(cfg, e, regime, 1.0)
}

/// As [`assemble_regime`] with gamma multiplied by `gamma_sign`; used to
/// inject a sign fault into the acceptance checks.
#[doc(hidden)]
pub fn assemble_with_gamma_sign(
    cfg: &ScenarioConfig,
    e: &MatrixElementSet,
    regime: Regime,
    gamma_sign: f64,
) -> Result<TwoQubitState> {
    let m = &cfg.measurement;
    if regime.is_selective() {
        let classified = match m.kind {
            MeasurementKind::Selective => classify_regime(m.epsilon, cfg.coupling)?,
            MeasurementKind::None => Regime::Baseline,
            MeasurementKind::NonSelective => Regime::NonSelective,
        };
        let allowed = m.kind == MeasurementKind::Selective && (cfg.regime_override.is_some() || classified == regime);
        if !allowed {
            return Err(Error::InconsistentRegime {
                requested: regime.to_string(),
                classified: classified.to_string(),
            });
        }
    }
    let matrix = state_for(regime, e, m.epsilon, m.xi, gamma_sign)?;
    Ok(TwoQubitState { matrix, regime, order_note: "lambda^2" })
}

/// Row-major dump, one row per line, entries as "re,im".
pub fn dump_matrix(m: &Mat4) -> String {
    let mut s = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|z| format!("{:.17e},{:.17e}", z.re, z.im)).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<Mat4> {
    let mut m = zeros();
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.len() != 4 {
        return Err(Error::Domain(format!("expected 4 rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split_whitespace().collect();
        if cells.len() != 4 {
            return Err(Error::Domain(format!("row {i}: expected 4 entries")));
        }
        for (j, c) in cells.iter().enumerate() {
            let (a, b) = c.split_once(',').ok_or_else(|| Error::Domain(format!("entry {i},{j}: {c}")))?;
            let parse = |x: &str| x.parse::<f64>().map_err(|e| Error::Domain(format!("entry {i},{j}: {e}")));
            m[i][j] = Complex64::new(parse(a)?, parse(b)?);
        }
    }
    Ok(m)
}
