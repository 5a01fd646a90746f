use std::f64::consts::PI;

use harvestlab::harvestctl::{preset, Axis, FigId};
use harvestlab::matrix_elements::{element_set, MatrixElementSet};
use harvestlab::protocol::{DetectorParams, MeasurementSpec, Regime, ScenarioConfig};
use harvestlab::states::{
    assemble_regime, assemble_state, dump_matrix, hermitian_defect, parse_matrix, tilde_elements, trace, Mat4,
};
use harvestlab::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn scenario(gap: f64, xa: f64, xb: f64, tb: f64, tc: f64, lam: f64, eps: f64, xi: f64) -> ScenarioConfig {
    let d = |x: f64, t: f64| DetectorParams::new(gap, [x, 0.0, 0.0], t);
    ScenarioConfig {
        det_a: d(xa, 0.0),
        det_b: d(xb, tb),
        det_c: d(0.0, tc),
        coupling: lam,
        measurement: MeasurementSpec::selective(eps, xi, tb.max(tc).max(0.0) + 5.0),
        regime_override: None,
    }
}

fn max_diff(a: &Mat4, b: &Mat4, cells: &[(usize, usize)]) -> f64 {
    cells.iter().map(|&(i, j)| (a[i][j] - b[i][j]).norm()).fold(0.0, f64::max)
}

#[test]
fn non_selective_matches_baseline_for_every_preset() {
    for f in FigId::ALL {
        let (base, spec) = preset(f);
        for x in [spec.grid[0], spec.grid[spec.grid.len() - 1]] {
            let mut cfg = spec.axis.apply(&base, x);
            cfg.measurement = MeasurementSpec::non_selective(cfg.measurement.measurement_time);
            let e = element_set(&cfg).unwrap();
            let ns = assemble_state(&cfg, &e).unwrap();
            let wm = assemble_regime(&cfg, &e, Regime::Baseline).unwrap();
            assert_eq!(ns.regime, Regime::NonSelective);
            assert!(max_diff(&ns.matrix, &wm.matrix, &all_cells()) <= 1e-15, "{f}");
        }
    }
}

fn all_cells() -> Vec<(usize, usize)> {
    (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect()
}

#[test]
fn gamma_lives_in_first_column_and_scales_as_inverse_epsilon() {
    let (base, _) = preset(FigId::Fig2);
    let base = Axis::DeltaAC.apply(&base, 1.0);
    let at = |eps: f64| {
        let mut cfg = base;
        cfg.measurement.epsilon = eps;
        let e = element_set(&cfg).unwrap();
        (assemble_regime(&cfg, &e, Regime::NonOrthogonal).unwrap().matrix, assemble_regime(&cfg, &e, Regime::Baseline).unwrap().matrix)
    };
    let (s1, wm) = at(0.2);
    let (s2, _) = at(0.4);
    let measured = [(1, 0), (2, 0), (0, 1), (0, 2)];
    let rest: Vec<_> = all_cells().into_iter().filter(|c| !measured.contains(c) && *c != (0, 0)).collect();
    assert!(max_diff(&s1, &wm, &rest) == 0.0);
    assert!(max_diff(&s2, &wm, &rest) == 0.0);
    for (i, j) in [(1, 0), (2, 0)] {
        assert!(s1[i][j].norm() > 0.0);
        // 1/eps up to the sqrt(1 - eps^2) and L_CC/eps^2 corrections
        let r = (s1[i][j] / s2[i][j]).norm() * (1.0f64 - 0.16).sqrt() / (1.0f64 - 0.04).sqrt();
        assert!((r - 2.0).abs() < 1e-3, "{r}");
    }
}

#[test]
fn transition_approaches_orthogonal_at_the_boundary() {
    // diagonal and corner entries differ by O(lambda^3) at eps = lambda^(3/2)
    let block = [(1, 1), (2, 2), (3, 3), (3, 0), (2, 1)];
    let mut scaled = Vec::new();
    for lam in [1e-3, 1e-4] {
        let mut cfg = scenario(0.5, -1.0, 1.0, 0.0, -2.0, lam, lam.powf(1.5) * (1.0 + 1e-9), 0.7);
        let e = element_set(&cfg).unwrap();
        assert_eq!(cfg.classified_regime().unwrap(), Regime::Transition);
        let t = assemble_regime(&cfg, &e, Regime::Transition).unwrap().matrix;
        cfg.regime_override = Some(Regime::Orthogonal);
        let o = assemble_regime(&cfg, &e, Regime::Orthogonal).unwrap().matrix;
        scaled.push(max_diff(&t, &o, &block) / lam.powi(3));
    }
    let ratio = scaled[0] / scaled[1];
    assert!((0.5..2.0).contains(&ratio), "{scaled:?}");
}

#[test]
fn selective_regime_must_match_classification() {
    let cfg = scenario(2.5, -2.5, 2.5, 0.0, -3.0, 0.01, 0.5, 0.0);
    let e = element_set(&cfg).unwrap();
    assert!(matches!(assemble_regime(&cfg, &e, Regime::Orthogonal), Err(Error::InconsistentRegime { .. })));
    assert_eq!(assemble_state(&cfg, &e).unwrap().regime, Regime::NonOrthogonal);
    let mut forced = cfg;
    forced.regime_override = Some(Regime::Orthogonal);
    assert!(assemble_regime(&forced, &e, Regime::Orthogonal).is_ok());
}

#[test]
fn orthogonal_needs_lcc() {
    let cfg = scenario(2.5, -2.5, 2.5, 0.0, -3.0, 0.01, 0.0, 0.0);
    let mut e = element_set(&cfg).unwrap();
    e.l_cc = 0.0;
    assert!(matches!(assemble_regime(&cfg, &e, Regime::Orthogonal), Err(Error::Degenerate(_))));
}

#[test]
fn dump_parse_round_trip() {
    let (base, _) = preset(FigId::Fig7);
    let e = element_set(&base).unwrap();
    let m = assemble_state(&base, &e).unwrap().matrix;
    assert_eq!(parse_matrix(&dump_matrix(&m)).unwrap(), m);
    assert!(parse_matrix("1,0 0,0").is_err());
}

fn config() -> impl Strategy<Value = ScenarioConfig> {
    (
        (0.5..3.5f64, -4.0..0.0f64, 0.0..4.0f64, -5.0..5.0f64, -8.0..8.0f64),
        (0.002..0.05f64, 0.0..1.0f64, 0.0..2.0 * PI),
    )
        .prop_map(|((gap, xa, xb, tb, tc), (lam, eps, xi))| scenario(gap, xa, xb, tb, tc, lam, eps, xi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn states_are_hermitian_with_unit_trace(cfg in config()) {
        let e = element_set(&cfg).unwrap();
        let mut forced = cfg;
        forced.regime_override = Some(Regime::Transition);
        let mut states = vec![
            assemble_regime(&cfg, &e, Regime::Baseline).unwrap(),
            assemble_regime(&cfg, &e, Regime::NonSelective).unwrap(),
            assemble_state(&cfg, &e).unwrap(),
            assemble_regime(&forced, &e, Regime::Transition).unwrap(),
            assemble_regime(&forced, &e, Regime::Orthogonal).unwrap(),
        ];
        if cfg.measurement.epsilon > 0.0 {
            states.push(assemble_regime(&forced, &e, Regime::NonOrthogonal).unwrap());
        }
        for st in states {
            let m = st.matrix;
            prop_assert!(hermitian_defect(&m) <= 1e-12);
            let t = trace(&m);
            prop_assert!((t.re - 1.0).abs() <= 4.0 * f64::EPSILON && t.im == 0.0);
        }
    }

    #[test]
    fn measurement_only_adds_noise(
        laa in 1e-3..1.0f64, lbb in 1e-3..1.0f64, lcc in 1e-3..1.0f64,
        u in 0.0..1.0f64, v in 0.0..1.0f64, a in 0.0..2.0 * PI, b in 0.0..2.0 * PI,
        mac in 0.0..1.0f64, mbc in 0.0..1.0f64,
    ) {
        let e = MatrixElementSet {
            l_aa: laa,
            l_bb: lbb,
            l_cc: lcc,
            l_ab: Complex64::new(0.0, 0.0),
            l_ac: Complex64::from_polar(u * (laa * lcc).sqrt(), a),
            l_bc: Complex64::from_polar(v * (lbb * lcc).sqrt(), b),
            m_ab: Complex64::new(0.0, 0.0),
            m_ac: Complex64::from_polar(mac, b),
            m_bc: Complex64::from_polar(mbc, a),
        };
        let t = tilde_elements(&e).unwrap();
        prop_assert!(t.lt_aa >= e.l_aa && t.lt_bb >= e.l_bb);
    }
}
