use std::f64::consts::PI;

use harvestlab::harvestctl::accept::PERTURBATIVE_C;
use harvestlab::harvestctl::{preset, FigId};
use harvestlab::matrix_elements::element_set;
use harvestlab::negativity::{
    generic_state, hermitian_eigenvalues, negativity_baseline, negativity_exact, negativity_exact_matrix,
    negativity_orthogonal, negativity_transition, partial_transpose_b, perturbative_roots,
};
use harvestlab::protocol::Regime;
use harvestlab::states::{assemble_regime, primed_elements, tilde_elements, Mat4};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn perturbative_roots_example() {
    let r = 0.03;
    let got = perturbative_roots(r, r, c(0.0, 0.0), c(0.01, 0.0)).unwrap();
    for (g, w) in got.iter().zip([1.0 - 2.0 * r, 0.0, r, r]) {
        assert!((g - w).abs() < 1e-15, "{got:?}");
    }
}

#[test]
fn orthogonal_never_beats_baseline_on_fig2() {
    let (base, spec) = preset(FigId::Fig2);
    for &x in &spec.grid {
        let e = element_set(&spec.axis.apply(&base, x)).unwrap();
        let t = tilde_elements(&e).unwrap();
        assert!(negativity_orthogonal(&t) <= negativity_baseline(&e), "at {x}");
    }
}

#[test]
fn baseline_formula_matches_eigenvalues_on_fig2() {
    let (base, spec) = preset(FigId::Fig2);
    let lam = base.coupling;
    for &x in spec.grid.iter().step_by(8) {
        let cfg = spec.axis.apply(&base, x);
        let e = element_set(&cfg).unwrap();
        let exact = negativity_exact(&assemble_regime(&cfg, &e, Regime::Baseline).unwrap()).unwrap();
        assert!((exact.value - negativity_baseline(&e)).abs() <= PERTURBATIVE_C * lam.powi(3), "at {x}");
    }
}

#[test]
fn transition_closed_form_tracks_exact_on_fig7() {
    let (base, spec) = preset(FigId::Fig7);
    let lam = base.coupling;
    let mut cfg = spec.axis.apply(&base, spec.grid[spec.grid.len() / 4]);
    cfg.regime_override = Some(Regime::Transition);
    let e = element_set(&cfg).unwrap();
    for k in 0..8 {
        cfg.measurement.xi = k as f64 * PI / 4.0;
        let st = assemble_regime(&cfg, &e, Regime::Transition).unwrap();
        let p = primed_elements(&e, cfg.measurement.epsilon, cfg.measurement.xi).unwrap();
        let n = negativity_transition(&st, &p, f64::INFINITY).unwrap();
        assert_eq!(n.value(), n.exact.value);
        assert!((n.closed - n.exact.value).abs() <= PERTURBATIVE_C * lam.powi(3), "{n:?}");
        assert!(!n.discrepant);
    }
}

fn hermitian() -> impl Strategy<Value = Mat4> {
    prop::collection::vec(-1.0..1.0f64, 16).prop_map(|v| {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            m[i][i] = c(v[k], 0.0);
            k += 1;
            for j in 0..i {
                m[i][j] = c(v[k], v[k + 1]);
                m[j][i] = m[i][j].conj();
                k += 2;
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eigenvalues_keep_trace_and_frobenius_norm(m in hermitian()) {
        let e = hermitian_eigenvalues(&m).unwrap();
        let tr: f64 = (0..4).map(|i| m[i][i].re).sum();
        let fro: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((e.iter().sum::<f64>() - tr).abs() <= 1e-12);
        prop_assert!((e.iter().map(|x| x * x).sum::<f64>() - fro).abs() <= 1e-12);
    }

    #[test]
    fn perturbative_roots_sum_to_one(
        r22 in 0.0..0.3f64, r33 in 0.0..0.3f64, a in 0.0..0.3f64, ph in 0.0..2.0 * PI,
    ) {
        let r = perturbative_roots(r22, r33, Complex64::from_polar(a, ph), c(0.0, 0.0)).unwrap();
        prop_assert!((r.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(r[0] > 0.0 && r[2] >= 0.0);
    }

    #[test]
    fn only_one_eigenvalue_goes_negative(
        lam in 0.002..0.03f64, laa in 0.0..1.0f64, lbb in 0.0..1.0f64,
        u in 0.0..1.0f64, v in 0.0..1.5f64, a in 0.0..2.0 * PI, b in 0.0..2.0 * PI,
    ) {
        let l2 = lam * lam;
        let lab = Complex64::from_polar(u * (laa * lbb).sqrt(), a);
        let m = generic_state(l2 * lbb, l2 * laa, Complex64::from_polar(v, b) * l2, lab * l2);
        let eigs = hermitian_eigenvalues(&partial_transpose_b(&m).unwrap()).unwrap();
        let thr = PERTURBATIVE_C * lam.powi(3);
        prop_assert!(eigs.iter().filter(|&&x| x < -thr).count() <= 1, "{eigs:?}");
        prop_assert!(eigs[3] > 0.5);
        prop_assert!((negativity_exact_matrix(&m).unwrap().value - (-eigs[0]).max(0.0)).abs() <= thr);
    }
}
