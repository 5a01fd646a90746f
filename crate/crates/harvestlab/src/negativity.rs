//! Negativity of two-detector states, exactly and from the perturbative
//! closed forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_elements::MatrixElementSet;
use crate::states::{hermitian_defect, zeros, Mat4, PrimedElements, TildeElements, TwoQubitState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ExactEigen,
    PerturbativeGeneric,
    PerturbativeBaseline,
    PerturbativeTransition,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactEigen => "exact_eigen",
            Method::PerturbativeGeneric => "perturbative_generic",
            Method::PerturbativeBaseline => "perturbative_baseline",
            Method::PerturbativeTransition => "perturbative_transition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    pub value: f64,
    pub method: Method,
    pub eigenvalues: Option<[f64; 4]>,
}

impl NegativityResult {
    /// Value in units of lambda^2.
    pub fn scaled(&self, lambda: f64) -> f64 {
        self.value / (lambda * lambda)
    }
}

/// Eigenvalues (ascending) of a Hermitian 4x4 matrix.
///
/// The matrix is embedded as the real symmetric [[A, -B], [B, A]] and
/// diagonalized by cyclic Jacobi rotations; every eigenvalue then appears
/// twice.
pub fn hermitian_eigenvalues(m: &Mat4) -> Result<[f64; 4]> {
    let mut a = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let z = 0.5 * (m[i][j] + m[j][i].conj());
            a[i][j] = z.re;
            a[i + 4][j + 4] = z.re;
            a[i + 4][j] = z.im;
            a[i][j + 4] = -z.im;
        }
    }
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if !scale.is_finite() {
        return Err(Error::Numerical("non-finite matrix entries".into()));
    }
    let mut converged = scale == 0.0;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..7 {
            for q in (p + 1)..8 {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                // negligible next to both diagonal entries: drop it
                let g = 100.0 * apq.abs();
                if a[p][p].abs() + g == a[p][p].abs() && a[q][q].abs() + g == a[q][q].abs() {
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + theta.hypot(1.0)) };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..8 {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                    a[p][k] = a[k][p];
                    a[q][k] = a[k][q];
                }
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical("Jacobi iteration did not converge".into()));
    }
    let mut d: Vec<f64> = (0..8).map(|i| a[i][i]).collect();
    d.sort_by(|x, y| x.total_cmp(y));
    Ok([d[0], d[2], d[4], d[6]])
}

/// Partial transpose on detector B: <a b|T|c d> = <a d|rho|c b>.
pub fn partial_transpose_b(m: &Mat4) -> Result<Mat4> {
    let d = hermitian_defect(m);
    if d > 1e-10 {
        return Err(Error::Domain(format!("matrix is not Hermitian (defect {d:e})")));
    }
    let mut out = zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for e in 0..2 {
                    out[2 * a + b][2 * c + e] = m[2 * a + e][2 * c + b];
                }
            }
        }
    }
    Ok(out)
}

fn negativity_of(eigs: &[f64; 4]) -> f64 {
    eigs.iter().map(|x| (x.abs() - x) / 2.0).sum()
}

pub fn negativity_exact_matrix(m: &Mat4) -> Result<NegativityResult> {
    let eigs = hermitian_eigenvalues(&partial_transpose_b(m)?)?;
    Ok(NegativityResult { value: negativity_of(&eigs), method: Method::ExactEigen, eigenvalues: Some(eigs) })
}

pub fn negativity_exact(state: &TwoQubitState) -> Result<NegativityResult> {
    negativity_exact_matrix(&state.matrix)
}

fn harvest_formula(l_aa: f64, l_bb: f64, m_ab: Complex64) -> f64 {
    let d = l_aa - l_bb;
    ((m_ab.norm_sqr() + d * d / 4.0).sqrt() - (l_aa + l_bb) / 2.0).max(0.0)
}

/// Negativity of the generic second-order structure, with entries given
/// in units of lambda^2.
pub fn negativity_perturbative(r22: f64, r33: f64, r41: Complex64, lambda: f64) -> Result<f64> {
    if !(r22 >= 0.0 && r33 >= 0.0) {
        return Err(Error::Domain(format!("diagonal entries ({r22}, {r33}) must be non-negative")));
    }
    Ok(lambda * lambda * harvest_formula(r33, r22, r41))
}

pub fn negativity_baseline(e: &MatrixElementSet) -> f64 {
    harvest_formula(e.l_aa, e.l_bb, e.m_ab)
}

pub fn negativity_orthogonal(t: &TildeElements) -> f64 {
    harvest_formula(t.lt_aa, t.lt_bb, t.mt_ab)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionNegativity {
    /// Exact eigenvalue result; this is the reported value.
    pub exact: NegativityResult,
    /// Closed form with a 4|M'|^2 term and -8 Re(a b M'*), a and b being
    /// the eg and ge entries of the first column.
    pub closed: f64,
    /// The four-term radicand with zeta = +8 Re(L'_A L'_B M'^*) built
    /// from the primed elements.
    pub printed: f64,
    pub printed_discrepancy: f64,
    /// True when |printed - exact| exceeds the residual bound.
    pub discrepant: bool,
}

impl TransitionNegativity {
    pub fn value(&self) -> f64 {
        self.exact.value
    }
}

fn transition_formula(alpha: f64, alpha_bar: f64, beta: f64, beta_bar: f64, extra: f64) -> f64 {
    let rad = alpha_bar * alpha_bar + beta * beta - 2.0 * beta_bar * alpha_bar + extra;
    (rad.max(0.0).sqrt() / 2.0 - (alpha - beta) / 2.0).max(0.0)
}

/// Negativity of a transition-regime state. `bound` is the residual
/// allowed between the exact value and the printed closed form.
pub fn negativity_transition(
    state: &TwoQubitState,
    primed: &PrimedElements,
    bound: f64,
) -> Result<TransitionNegativity> {
    let exact = negativity_exact(state)?;
    let m = &state.matrix;
    let (a, b, mp) = (m[2][0], m[1][0], m[3][0]);
    let (laa, lbb) = (m[2][2].re, m[1][1].re);
    let closed = transition_formula(
        laa + lbb,
        laa - lbb,
        a.norm_sqr() + b.norm_sqr(),
        a.norm_sqr() - b.norm_sqr(),
        4.0 * mp.norm_sqr() - 8.0 * (a * b * mp.conj()).re,
    );
    let p = primed;
    let printed = transition_formula(
        p.lp_aa + p.lp_bb,
        p.lp_aa - p.lp_bb,
        p.lp_a.norm_sqr() + p.lp_b.norm_sqr(),
        p.lp_a.norm_sqr() - p.lp_b.norm_sqr(),
        8.0 * (p.lp_a * p.lp_b * p.mp_ab.conj()).re,
    );
    let disc = (printed - exact.value).abs();
    Ok(TransitionNegativity {
        exact,
        closed,
        printed,
        printed_discrepancy: disc,
        discrepant: disc > bound,
    })
}

/// Second-order expansions of the partial-transpose eigenvalues for the
/// generic structure with diagonal (., r22, r33, 0) and corner r41.
/// r32 does not enter at this order.
pub fn perturbative_roots(r22: f64, r33: f64, r41: Complex64, _r32: Complex64) -> Result<[f64; 4]> {
    if !(r22 >= 0.0 && r33 >= 0.0) {
        return Err(Error::Domain(format!("diagonal entries ({r22}, {r33}) must be non-negative")));
    }
    let s = r22 + r33;
    let root = (s * s + 4.0 * (r41.norm_sqr() - r22 * r33)).max(0.0).sqrt();
    Ok([1.0 - s, 0.0, (s + root) / 2.0, (s - root) / 2.0])
}

/// The generic second-order state with diagonal (1 - r22 - r33, r22, r33, 0),
/// r32 at (eg, ge) and r41 at (ee, gg).
pub fn generic_state(r22: f64, r33: f64, r41: Complex64, r32: Complex64) -> Mat4 {
    let mut m = zeros();
    m[0][0] = Complex64::new(1.0 - r22 - r33, 0.0);
    m[1][1] = Complex64::new(r22, 0.0);
    m[2][2] = Complex64::new(r33, 0.0);
    m[2][1] = r32;
    m[1][2] = r32.conj();
    m[3][0] = r41;
    m[0][3] = r41.conj();
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: f64, b: f64) -> Complex64 {
        Complex64::new(a, b)
    }

    #[test]
    fn identity_quarter() {
        let mut m = zeros();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(0.25, 0.0);
        }
        assert_eq!(partial_transpose_b(&m).unwrap(), m);
        assert_eq!(negativity_exact_matrix(&m).unwrap().value, 0.0);
    }

    #[test]
    fn bell_state() {
        let mut m = zeros();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[i][j] = c(0.5, 0.0);
        }
        let n = negativity_exact_matrix(&m).unwrap();
        assert!((n.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn transpose_is_involution() {
        let m = generic_state(0.1, 0.2, c(0.05, 0.02), c(0.01, -0.03));
        let t = partial_transpose_b(&m).unwrap();
        assert_eq!(t[2][1], m[3][0]);
        assert_eq!(partial_transpose_b(&t).unwrap(), m);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = zeros();
        m[1][0] = c(1.0, 0.0);
        assert!(matches!(partial_transpose_b(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn eigenvalues_of_diagonal_and_2x2() {
        let mut m = zeros();
        m[0][0] = c(3.0, 0.0);
        m[1][1] = c(-1.0, 0.0);
        m[2][2] = c(1.0, 0.0);
        m[2][3] = c(0.0, 1.0);
        m[3][2] = c(0.0, -1.0);
        m[3][3] = c(1.0, 0.0);
        let e = hermitian_eigenvalues(&m).unwrap();
        for (x, y) in e.iter().zip([-1.0, 0.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn formula_collapses() {
        assert!((negativity_perturbative(0.0, 0.0, c(0.3, 0.4), 0.1).unwrap() - 0.005).abs() < 1e-17);
        assert_eq!(negativity_perturbative(1.0, 1.0, c(0.6, 0.0), 0.1).unwrap(), 0.0);
        assert!(negativity_perturbative(-1.0, 0.0, c(0.0, 0.0), 0.1).is_err());
    }

    #[test]
    fn root_examples() {
        assert_eq!(perturbative_roots(0.0, 0.0, c(0.0, 0.0), c(0.0, 0.0)).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let r = perturbative_roots(0.1, 0.1, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        for (x, y) in r.iter().zip([0.8, 0.0, 0.1, 0.1]) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
