use harvestlab::harvestctl::{preset, Axis, FigId};
use harvestlab::matrix_elements::{
    element_set, element_set_with, local_l, m_element, m_element_closed, nonlocal_l, nonlocal_l_closed,
    nonlocal_l_closed_erfi, ElementCache, ElementOptions, GeometryPair,
};
use harvestlab::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn closed_form_on_grid() {
    let mut worst: f64 = 0.0;
    for gap in [1.0, 2.5, 5.0] {
        for l in [1.0, 2.5, 5.0, 10.0] {
            for d in [0.0, 2.5, 5.0, 10.0] {
                let g = GeometryPair::new(l, d).unwrap();
                worst = worst.max(rel(nonlocal_l_closed(gap, g, 0.1).unwrap(), nonlocal_l(gap, gap, g, 0.1).unwrap()));
            }
        }
    }
    assert!(worst <= 1e-7, "{worst:e}");
}

#[test]
fn literal_erfi_form_agrees_where_it_is_stable() {
    for (gap, l, d) in [(1.0, 2.5, 0.0), (1.0, 5.0, 2.5), (2.5, 10.0, 5.0)] {
        let g = GeometryPair::new(l, d).unwrap();
        let a = nonlocal_l_closed_erfi(gap, g, 1.0).unwrap();
        let b = nonlocal_l_closed(gap, g, 1.0).unwrap();
        assert!(rel(a, b) < 1e-8, "{gap} {l} {d}");
    }
}

#[test]
fn m_closed_form_agrees() {
    for (l, d) in [(0.0, 0.0), (0.0, 5.0), (2.5, 0.0), (2.5, 10.0), (5.0, 5.0)] {
        let g = GeometryPair::new(l, d).unwrap();
        let a = m_element(2.5, 0.0, -d, g, 1.0).unwrap();
        let b = m_element_closed(2.5, 0.0, -d, g, 1.0).unwrap();
        assert!(rel(a, b) < 1e-8, "{l} {d}");
    }
}

#[test]
fn coincident_m_is_the_finite_part() {
    // M(L) = P / L + M(0) + O(L), P the pole dropped at L = 0
    let (gap, d) = (1.5, 2.0);
    let m0 = m_element(gap, 0.0, -d, GeometryPair::new(0.0, d).unwrap(), 1.0).unwrap();
    let pole = Complex64::new(0.0, std::f64::consts::PI.sqrt() / 2.0) * (-d * d / 4.0 - gap * gap).exp()
        / (4.0 * std::f64::consts::PI.powi(2))
        * Complex64::from_polar(1.0, -gap * d);
    let gaps: Vec<f64> = [1e-2, 5e-3]
        .iter()
        .map(|&l| {
            let ml = m_element(gap, 0.0, -d, GeometryPair::new(l, d).unwrap(), 1.0).unwrap();
            (ml - pole / l - m0).norm() / l
        })
        .collect();
    // the remainder shrinks linearly with L
    assert!(gaps[0] < 1e-2 && (gaps[1] / gaps[0] - 1.0).abs() < 0.1, "{gaps:?}");
}

#[test]
fn decay_on_fig2_geometry() {
    let g0 = GeometryPair::new(2.5, 0.0).unwrap();
    let l0 = nonlocal_l(2.5, 2.5, g0, 1.0).unwrap().norm();
    let m0 = m_element(2.5, 0.0, 0.0, g0, 1.0).unwrap().norm();
    for i in 0..=56 {
        let d = 6.0 + 0.25 * i as f64;
        let g = GeometryPair::new(2.5, d).unwrap();
        assert!(nonlocal_l(2.5, 2.5, g, 1.0).unwrap().norm() <= l0, "L at {d}");
        assert!(m_element(2.5, 0.0, -d, g, 1.0).unwrap().norm() <= m0, "M at {d}");
    }
}

#[test]
fn cache_round_trips_through_disk() {
    let dir = std::env::temp_dir().join(format!("harvestlab-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (cfg, spec) = preset(FigId::Fig2);
    let cfg = spec.axis.apply(&cfg, 3.0);
    let cache = ElementCache::with_dir(&dir).unwrap();
    let opts = ElementOptions { rel_tol: 1e-9, cache: Some(&cache) };
    let a = element_set_with(&cfg, &opts).unwrap();
    cache.persist().unwrap();
    let again = ElementCache::with_dir(&dir).unwrap();
    assert_eq!(again.len(), cache.len());
    let b = element_set_with(&cfg, &ElementOptions { rel_tol: 1e-9, cache: Some(&again) }).unwrap();
    assert_eq!(a, b);
    let uncached = element_set_with(&cfg, &ElementOptions { rel_tol: 1e-9, cache: None }).unwrap();
    assert_eq!(a, uncached);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn element_errors_name_the_pair() {
    let (mut cfg, _) = preset(FigId::Fig2);
    cfg.det_c.gap = 3.0;
    let e = element_set(&cfg).unwrap_err();
    assert!(matches!(e, Error::Pair { pair, .. } if pair == "AC"), "{e}");
}

#[test]
fn fig2_elements_respect_invariants() {
    let (base, spec) = preset(FigId::Fig2);
    for x in [0.0, 2.5, 10.0, 20.0] {
        let e = element_set(&Axis::DeltaAC.apply(&base, x)).unwrap();
        assert!(e.invariant_violations(1e-6).is_empty(), "{:?}", e.invariant_violations(1e-6));
    }
    assert_eq!(spec.axis, Axis::DeltaAC);
}

fn geometry() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..4.0f64, 0.0..12.0f64, -15.0..15.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn hermiticity_seed((gap, l, d) in geometry()) {
        let a = nonlocal_l(gap, gap, GeometryPair::new(l, d).unwrap(), 1.0).unwrap();
        let b = nonlocal_l(gap, gap, GeometryPair::new(l, -d).unwrap(), 1.0).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-8 * a.norm() + 1e-300);
    }

    #[test]
    fn m_is_symmetric((gap, l, d) in geometry(), t in -10.0..10.0f64) {
        let ij = m_element(gap, t, t - d, GeometryPair::new(l, d).unwrap(), 1.0).unwrap();
        let ji = m_element(gap, t - d, t, GeometryPair::new(l, -d).unwrap(), 1.0).unwrap();
        prop_assert!((ij - ji).norm() <= 1e-8 * ij.norm() + 1e-300);
    }

    #[test]
    fn coupling_is_a_prefactor((gap, l, d) in geometry(), lam in 1e-4..0.15f64) {
        let g = GeometryPair::new(l, d).unwrap();
        prop_assert_eq!(local_l(gap, 2.0 * lam).unwrap(), 4.0 * local_l(gap, lam).unwrap());
        let r = nonlocal_l(gap, gap, g, 2.0 * lam).unwrap() / nonlocal_l(gap, gap, g, lam).unwrap();
        prop_assert!((r - 4.0).norm() <= 8.0 * f64::EPSILON);
        let r = m_element(gap, 0.0, -d, g, 2.0 * lam).unwrap() / m_element(gap, 0.0, -d, g, lam).unwrap();
        prop_assert!((r - 4.0).norm() <= 8.0 * f64::EPSILON);
    }

    #[test]
    fn cauchy_schwarz((gap, l, d) in geometry()) {
        let lij = nonlocal_l(gap, gap, GeometryPair::new(l, d).unwrap(), 1.0).unwrap();
        let lii = local_l(gap, 1.0).unwrap();
        prop_assert!(lij.norm_sqr() <= lii * lii * (1.0 + 1e-6));
    }
}
