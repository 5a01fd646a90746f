//! C ABI over harvestlab.
//!
//! Scenarios, element sets and states are opaque handles, each released
//! with its own `hl_*_free`. Fallible calls return an [`HlStatus`]; the
//! message of a failure is available from [`hl_last_error`] on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use harvestlab::harvestctl::{preset, FigId};
use harvestlab::matrix_elements::{element_set_with, ElementOptions, MatrixElementSet};
use harvestlab::negativity::negativity_exact;
use harvestlab::protocol::{validate_scenario, Regime, ScenarioConfig};
use harvestlab::states::{assemble_regime, TwoQubitState};
use harvestlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidScenario = 3,
    Domain = 4,
    Convergence = 5,
    Unsupported = 6,
    Degenerate = 7,
    InconsistentRegime = 8,
    Numerical = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlRegime {
    Baseline = 0,
    NonSelective = 1,
    NonOrthogonal = 2,
    Orthogonal = 3,
    Transition = 4,
}

impl From<HlRegime> for Regime {
    fn from(r: HlRegime) -> Regime {
        match r {
            HlRegime::Baseline => Regime::Baseline,
            HlRegime::NonSelective => Regime::NonSelective,
            HlRegime::NonOrthogonal => Regime::NonOrthogonal,
            HlRegime::Orthogonal => Regime::Orthogonal,
            HlRegime::Transition => Regime::Transition,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HlComplex {
    pub re: f64,
    pub im: f64,
}

/// Matrix elements of a scenario, in the same units as the coupling.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HlElementValues {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_cc: f64,
    pub l_ab: HlComplex,
    pub l_ac: HlComplex,
    pub l_bc: HlComplex,
    pub m_ab: HlComplex,
    pub m_ac: HlComplex,
    pub m_bc: HlComplex,
}

pub struct HlScenario(ScenarioConfig);
pub struct HlElements(MatrixElementSet);
pub struct HlState(TwoQubitState);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HlStatus {
    match e {
        Error::Domain(_) => HlStatus::Domain,
        Error::Convergence { .. } => HlStatus::Convergence,
        Error::Unsupported(_) => HlStatus::Unsupported,
        Error::Degenerate(_) => HlStatus::Degenerate,
        Error::InconsistentRegime { .. } => HlStatus::InconsistentRegime,
        Error::Invalid(_) => HlStatus::InvalidScenario,
        Error::Numerical(_) => HlStatus::Numerical,
        Error::Pair { source, .. } => status_of(source),
        Error::Io(_) => HlStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HlStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            HlStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (HlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (HlStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a scenario from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_from_json(json: *const c_char, out: *mut *mut HlScenario) -> HlStatus {
    guard(|| {
        let cfg = ScenarioConfig::from_json(text(json, "json")?).map_err(lib_err)?;
        put(out, HlScenario(cfg))
    })
}

/// Base scenario of a figure preset ("fig2", "fig7", ...).
///
/// # Safety
/// `fig` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_preset(fig: *const c_char, out: *mut *mut HlScenario) -> HlStatus {
    guard(|| {
        let f = FigId::parse(text(fig, "fig")?).map_err(lib_err)?;
        put(out, HlScenario(preset(f).0))
    })
}

/// Overrides the coupling; validated when elements are computed.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_set_coupling(s: *mut HlScenario, coupling: f64) -> HlStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        s.0.coupling = coupling;
        Ok(())
    })
}

/// Sets the selective measurement strength and phase.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_set_measurement(s: *mut HlScenario, epsilon: f64, xi: f64) -> HlStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        s.0.measurement.epsilon = epsilon;
        s.0.measurement.xi = xi;
        Ok(())
    })
}

/// Forces a regime instead of the classification by epsilon.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_force_regime(s: *mut HlScenario, regime: HlRegime) -> HlStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        s.0.regime_override = Some(regime.into());
        Ok(())
    })
}

/// Scenario as JSON. Free the string with [`hl_string_free`].
///
/// # Safety
/// `s` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_to_json(s: *const HlScenario, out: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let s = get(s, "scenario")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(s.0.to_json()).map_err(|e| (HlStatus::Io, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or come from [`hl_scenario_to_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `s` must be null or a scenario from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hl_scenario_free(s: *mut HlScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Computes all matrix elements of a scenario. `rel_tol` <= 0 selects the
/// default tolerance.
///
/// # Safety
/// `s` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_elements_compute(s: *const HlScenario, rel_tol: f64, out: *mut *mut HlElements) -> HlStatus {
    guard(|| {
        let s = get(s, "scenario")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = validate_scenario(s.0).map_err(lib_err)?;
        let mut opts = ElementOptions::default();
        if rel_tol > 0.0 {
            opts.rel_tol = rel_tol;
        }
        let e = element_set_with(&cfg, &opts).map_err(lib_err)?;
        put(out, HlElements(e))
    })
}

/// # Safety
/// `e` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_elements_values(e: *const HlElements, out: *mut HlElementValues) -> HlStatus {
    guard(|| {
        let e = &get(e, "elements")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = |z: num_complex::Complex64| HlComplex { re: z.re, im: z.im };
        *out = HlElementValues {
            l_aa: e.l_aa,
            l_bb: e.l_bb,
            l_cc: e.l_cc,
            l_ab: c(e.l_ab),
            l_ac: c(e.l_ac),
            l_bc: c(e.l_bc),
            m_ab: c(e.m_ab),
            m_ac: c(e.m_ac),
            m_bc: c(e.m_bc),
        };
        Ok(())
    })
}

/// # Safety
/// `e` must be null or elements from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hl_elements_free(e: *mut HlElements) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Two-detector state under `regime`.
///
/// # Safety
/// `s` and `e` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_state_assemble(
    s: *const HlScenario,
    e: *const HlElements,
    regime: HlRegime,
    out: *mut *mut HlState,
) -> HlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let st = assemble_regime(&get(s, "scenario")?.0, &get(e, "elements")?.0, regime.into()).map_err(lib_err)?;
        put(out, HlState(st))
    })
}

/// Copies the density matrix, row-major over gg, ge, eg, ee.
///
/// # Safety
/// `st` must come from this library; `out` must point to 16 HlComplex.
#[no_mangle]
pub unsafe extern "C" fn hl_state_matrix(st: *const HlState, out: *mut HlComplex) -> HlStatus {
    guard(|| {
        let st = get(st, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        for (k, z) in st.0.matrix.iter().flatten().enumerate() {
            *out.add(k) = HlComplex { re: z.re, im: z.im };
        }
        Ok(())
    })
}

/// Negativity of the state from the partial-transpose eigenvalues.
///
/// # Safety
/// `st` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_state_negativity(st: *const HlState, out: *mut f64) -> HlStatus {
    guard(|| {
        let n = negativity_exact(&get(st, "state")?.0).map_err(lib_err)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = n.value;
        Ok(())
    })
}

/// # Safety
/// `st` must be null or a state from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hl_state_free(st: *mut HlState) {
    if !st.is_null() {
        drop(Box::from_raw(st));
    }
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version"),
    };
    V.as_ptr()
}
