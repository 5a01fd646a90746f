use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_elements::{element_set_with, ElementOptions, MatrixElementSet};
use crate::negativity::{negativity_exact, negativity_perturbative, negativity_transition, Method};
use crate::protocol::{validate_scenario, MeasurementKind, Regime, ScenarioConfig};
use crate::states::{assemble_regime, outcome_probability, primed_elements};

use super::presets::{preset, PresetRef, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeValue {
    /// Exact partial-transpose negativity of the assembled state.
    pub value: f64,
    pub method: Method,
    /// Leading-order closed form for the same state.
    pub perturbative: f64,
    pub perturbative_method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis_value: f64,
    pub negativity_per_regime: BTreeMap<Regime, RegimeValue>,
    pub prob_outcome: f64,
    pub element_snapshot: Option<String>,
    #[serde(skip)]
    pub elements: Option<MatrixElementSet>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions<'a> {
    pub elements: ElementOptions<'a>,
}

/// Residual allowed between the printed transition closed form and the
/// exact value, in units of lambda^3.
pub const TRANSITION_PRINTED_C: f64 = 1.0;

/// Elements once, then every requested regime's state and negativity.
pub fn run_scenario(cfg: &ScenarioConfig, regimes: &[Regime], axis_value: f64, opts: &RunOptions<'_>) -> Result<SweepRecord> {
    let cfg = validate_scenario(*cfg)?;
    let e = element_set_with(&cfg, &opts.elements)?;
    let lam = cfg.coupling;
    let l2 = lam * lam;
    let mut out = BTreeMap::new();
    for &r in regimes {
        let st = assemble_regime(&cfg, &e, r)?;
        let exact = negativity_exact(&st)?;
        let (pert, pm) = if r == Regime::Transition {
            let p = primed_elements(&e, cfg.measurement.epsilon, cfg.measurement.xi)?;
            let t = negativity_transition(&st, &p, TRANSITION_PRINTED_C * l2 * lam)?;
            (t.closed, Method::PerturbativeTransition)
        } else {
            let m = &st.matrix;
            let v = negativity_perturbative(m[1][1].re.max(0.0) / l2, m[2][2].re.max(0.0) / l2, m[3][0] / l2, lam)?;
            let method = if matches!(r, Regime::Baseline | Regime::NonSelective) {
                Method::PerturbativeBaseline
            } else {
                Method::PerturbativeGeneric
            };
            (v, method)
        };
        out.insert(r, RegimeValue { value: exact.value, method: exact.method, perturbative: pert, perturbative_method: pm });
    }
    let prob = match cfg.measurement.kind {
        MeasurementKind::Selective => outcome_probability(&e, cfg.measurement.epsilon),
        _ => 1.0,
    };
    Ok(SweepRecord {
        axis_value,
        negativity_per_regime: out,
        prob_outcome: prob,
        element_snapshot: Some(e.digest()),
        elements: Some(e),
    })
}

/// One grid point across all series.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub series: Vec<std::result::Result<SweepRecord, String>>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.series.iter().any(|s| s.is_err())
    }
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub labels: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }
}

pub fn base_config(spec: &SweepSpec) -> Result<ScenarioConfig> {
    let mut base = match &spec.preset {
        PresetRef::Figure(f) => preset(*f).0,
        PresetRef::File(p) => ScenarioConfig::load(p)?,
    };
    if let Some(l) = spec.lambda {
        base.coupling = l;
        if matches!(spec.preset, PresetRef::Figure(_)) && base.measurement.epsilon > 0.0 {
            // transition presets tie epsilon to the coupling
            base.measurement.epsilon = l;
        }
    }
    Ok(base)
}

/// Evaluates every grid point independently (in parallel when a pool is
/// active) and returns rows ordered by axis value.
pub fn sweep(spec: &SweepSpec, opts: &RunOptions<'_>) -> Result<SweepTable> {
    spec.validate()?;
    let base = base_config(spec)?;
    let series = spec.series();
    let labels = series.iter().map(|s| s.label()).collect();
    let points: Vec<(f64, usize)> = spec.grid.iter().flat_map(|&x| (0..series.len()).map(move |i| (x, i))).collect();
    let results: Vec<std::result::Result<SweepRecord, String>> = points
        .par_iter()
        .map(|&(x, i)| {
            let cfg = spec.axis.apply(&series[i].apply(&base), x);
            run_scenario(&cfg, &spec.regimes, x, opts).map_err(|e| format!("{}={x}: {e}", spec.axis.name()))
        })
        .collect();
    let mut it = results.into_iter();
    let rows = spec
        .grid
        .iter()
        .map(|&x| SweepRow { axis_value: x, series: (0..series.len()).map(|_| it.next().expect("one result per point")).collect() })
        .collect();
    Ok(SweepTable { spec: spec.clone(), labels, rows })
}

fn fmt_f(x: f64) -> String {
    format!("{x:.11e}")
}

fn column(regime: Regime, label: &str, suffix: &str) -> String {
    if label.is_empty() {
        format!("{}{suffix}", regime.name())
    } else {
        format!("{}[{label}]{suffix}", regime.name())
    }
}

/// CSV with fixed 12-significant-digit scientific formatting.
pub fn to_csv(table: &SweepTable) -> String {
    let spec = &table.spec;
    let mut head = vec![spec.axis.name().to_string()];
    for l in &table.labels {
        for &r in &spec.regimes {
            head.push(column(r, l, ""));
            head.push(column(r, l, "_method"));
            head.push(column(r, l, "_pert"));
            head.push(column(r, l, "_pert_method"));
        }
    }
    for l in &table.labels {
        head.push(if l.is_empty() { "prob_outcome".into() } else { format!("prob_outcome[{l}]") });
    }
    head.push("error".into());
    let mut s = String::new();
    let quote = |x: &str| if x.contains(',') || x.contains('"') { format!("\"{}\"", x.replace('"', "\"\"")) } else { x.to_string() };
    let _ = writeln!(s, "{}", head.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","));
    for row in &table.rows {
        let mut cells = vec![fmt_f(row.axis_value)];
        let mut errors = Vec::new();
        for rec in &row.series {
            for &r in &spec.regimes {
                match rec.as_ref().ok().and_then(|rec| rec.negativity_per_regime.get(&r)) {
                    Some(v) => {
                        cells.push(fmt_f(v.value));
                        cells.push(v.method.name().into());
                        cells.push(fmt_f(v.perturbative));
                        cells.push(v.perturbative_method.name().into());
                    }
                    None => cells.extend(std::iter::repeat_n(String::new(), 4)),
                }
            }
            if let Err(e) = rec {
                errors.push(e.clone());
            }
        }
        for rec in &row.series {
            cells.push(rec.as_ref().map(|r| fmt_f(r.prob_outcome)).unwrap_or_default());
        }
        cells.push(errors.join(" | "));
        let _ = writeln!(s, "{}", cells.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
    }
    s
}

/// Runs `f` on a pool of `jobs` threads (global pool when None).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
