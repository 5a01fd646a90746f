use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{DetectorParams, MeasurementSpec, Regime, ScenarioConfig, DECOUPLING_DELAY};

/// Coupling used by every preset.
pub const DEFAULT_LAMBDA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigId {
    Fig2,
    Fig3,
    Fig5,
    Fig6like,
    Fig7,
    Fig8,
    Fig9,
}

impl FigId {
    pub const ALL: [FigId; 7] = [FigId::Fig2, FigId::Fig3, FigId::Fig5, FigId::Fig6like, FigId::Fig7, FigId::Fig8, FigId::Fig9];

    pub fn parse(s: &str) -> Result<FigId> {
        let k = s.to_ascii_lowercase().replace(['-', '_', '.', ' '], "");
        let k = k.strip_prefix("figure").or_else(|| k.strip_prefix("fig")).unwrap_or(&k);
        match k {
            "2" => Ok(FigId::Fig2),
            "3" => Ok(FigId::Fig3),
            "5" => Ok(FigId::Fig5),
            "6like" | "6" => Ok(FigId::Fig6like),
            "7" => Ok(FigId::Fig7),
            "8" => Ok(FigId::Fig8),
            "9" => Ok(FigId::Fig9),
            _ => Err(Error::Domain(format!("unknown figure preset '{s}'"))),
        }
    }
}

impl fmt::Display for FigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigId::Fig2 => "Fig2",
            FigId::Fig3 => "Fig3",
            FigId::Fig5 => "Fig5",
            FigId::Fig6like => "Fig6like",
            FigId::Fig7 => "Fig7",
            FigId::Fig8 => "Fig8",
            FigId::Fig9 => "Fig9",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "Delta_AC")]
    DeltaAC,
    #[serde(rename = "Delta_CA")]
    DeltaCA,
    Omega,
    #[serde(rename = "xi")]
    Xi,
    #[serde(rename = "epsilon")]
    Epsilon,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::DeltaAC => "Delta_AC",
            Axis::DeltaCA => "Delta_CA",
            Axis::Omega => "Omega",
            Axis::Xi => "xi",
            Axis::Epsilon => "epsilon",
        }
    }

    /// `base` with the axis parameter set to `v`. Delays move detector C
    /// relative to A.
    pub fn apply(self, base: &ScenarioConfig, v: f64) -> ScenarioConfig {
        let mut c = *base;
        match self {
            Axis::DeltaAC => c.det_c.switch_peak = c.det_a.switch_peak - v,
            Axis::DeltaCA => c.det_c.switch_peak = c.det_a.switch_peak + v,
            Axis::Omega => {
                c.det_a.gap = v;
                c.det_b.gap = v;
                c.det_c.gap = v;
            }
            Axis::Xi => c.measurement.xi = v,
            Axis::Epsilon => c.measurement.epsilon = v,
        }
        settle_measurement_time(&mut c);
        c
    }
}

/// Measurement after every detector has decoupled.
pub fn settle_measurement_time(c: &mut ScenarioConfig) {
    let last = c.det_a.switch_peak.max(c.det_b.switch_peak).max(c.det_c.switch_peak);
    c.measurement.measurement_time = last + DECOUPLING_DELAY;
}

/// Where a sweep takes its base scenario from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresetRef {
    Figure(FigId),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub preset: PresetRef,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub regimes: Vec<Regime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Curves over the gap; empty keeps the base scenario's gap.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gaps: Vec<f64>,
    /// Curves over the phase xi; empty keeps the base scenario's xi.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub xis: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.grid.is_empty() {
            v.push("grid is empty".to_string());
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            v.push("grid must be strictly increasing".to_string());
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            v.push("grid values must be finite".to_string());
        }
        if self.regimes.is_empty() {
            v.push("no regimes requested".to_string());
        }
        let delay_axis = matches!(self.axis, Axis::DeltaAC | Axis::DeltaCA);
        if delay_axis && self.grid.iter().any(|&x| x < 0.0) {
            v.push(format!("{} grid must be non-negative", self.axis.name()));
        }
        if matches!(self.axis, Axis::Omega) && !self.gaps.is_empty() {
            v.push("Omega axis cannot be combined with a gap series".to_string());
        }
        if matches!(self.axis, Axis::Xi) && !self.xis.is_empty() {
            v.push("xi axis cannot be combined with a xi series".to_string());
        }
        if let PresetRef::Figure(f) = self.preset {
            let fits = match f {
                FigId::Fig6like | FigId::Fig9 => self.axis != Axis::DeltaAC,
                _ => self.axis != Axis::DeltaCA,
            };
            if !fits {
                v.push(format!("axis {} does not fit preset {f}", self.axis.name()));
            }
            if matches!(f, FigId::Fig6like | FigId::Fig9) && self.axis == Axis::DeltaCA && self.grid.iter().any(|&x| x <= 0.0 || x >= 5.0) {
                v.push("Delta_CA must lie strictly between 0 and Delta_BA = 5".to_string());
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Series labels with the parameters they set.
    pub fn series(&self) -> Vec<Series> {
        let gaps: Vec<Option<f64>> = if self.gaps.is_empty() { vec![None] } else { self.gaps.iter().copied().map(Some).collect() };
        let xis: Vec<Option<f64>> = if self.xis.is_empty() { vec![None] } else { self.xis.iter().copied().map(Some).collect() };
        let mut out = Vec::new();
        for g in &gaps {
            for x in &xis {
                out.push(Series { gap: *g, xi: *x });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series {
    pub gap: Option<f64>,
    pub xi: Option<f64>,
}

impl Series {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(g) = self.gap {
            parts.push(format!("Omega={g}"));
        }
        if let Some(x) = self.xi {
            parts.push(format!("xi={:.4}", x));
        }
        parts.join(",")
    }

    pub fn apply(&self, base: &ScenarioConfig) -> ScenarioConfig {
        let mut c = *base;
        if let Some(g) = self.gap {
            c.det_a.gap = g;
            c.det_b.gap = g;
            c.det_c.gap = g;
        }
        if let Some(x) = self.xi {
            c.measurement.xi = x;
        }
        c
    }
}

pub fn quarter_grid(from_step: usize, to_step: usize) -> Vec<f64> {
    (from_step..=to_step).map(|i| i as f64 * 0.25).collect()
}

pub const XI_SET: [f64; 4] = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
pub const GAP_SET: [f64; 4] = [1.5, 2.0, 2.5, 3.0];
/// Gaps for the L_AB = 10 geometry, around its optimum L_AB/2 = 5.
pub const FAR_GAP_SET: [f64; 4] = [4.0, 4.5, 5.0, 5.5];

fn det(gap: f64, x: f64, t: f64) -> DetectorParams {
    DetectorParams::new(gap, [x, 0.0, 0.0], t)
}

/// A and B at -+L_AC on a line with C between them, all peaks at t = 0.
pub fn spacelike_config(gap: f64, l_ac: f64, measurement: MeasurementSpec) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        det_a: det(gap, -l_ac, 0.0),
        det_b: det(gap, l_ac, 0.0),
        det_c: det(gap, 0.0, 0.0),
        coupling: DEFAULT_LAMBDA,
        measurement,
        regime_override: None,
    };
    settle_measurement_time(&mut c);
    c
}

/// All three detectors at the origin, B peaking 5T after A.
pub fn colocated_config(gap: f64, measurement: MeasurementSpec) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        det_a: det(gap, 0.0, 0.0),
        det_b: det(gap, 0.0, 5.0),
        det_c: det(gap, 0.0, -1.0),
        coupling: DEFAULT_LAMBDA,
        measurement,
        regime_override: None,
    };
    settle_measurement_time(&mut c);
    c
}

/// Base scenario and default sweep of a figure.
pub fn preset(fig: FigId) -> (ScenarioConfig, SweepSpec) {
    let orth = MeasurementSpec::selective(0.0, 0.0, 0.0);
    let trans = MeasurementSpec::selective(DEFAULT_LAMBDA, 0.0, 0.0);
    let (cfg, axis, grid, regime, gaps, xis) = match fig {
        FigId::Fig2 => (spacelike_config(2.5, 2.5, orth), Axis::DeltaAC, quarter_grid(0, 80), Regime::Orthogonal, GAP_SET.to_vec(), vec![]),
        FigId::Fig3 => (spacelike_config(5.0, 5.0, orth), Axis::DeltaAC, quarter_grid(0, 80), Regime::Orthogonal, FAR_GAP_SET.to_vec(), vec![]),
        FigId::Fig5 => (colocated_config(2.5, orth), Axis::DeltaAC, quarter_grid(1, 80), Regime::Orthogonal, GAP_SET.to_vec(), vec![]),
        FigId::Fig6like => (colocated_config(2.5, orth), Axis::DeltaCA, quarter_grid(1, 19), Regime::Orthogonal, vec![1.5, 2.5], vec![]),
        FigId::Fig7 => (spacelike_config(2.5, 2.5, trans), Axis::DeltaAC, quarter_grid(1, 80), Regime::Transition, vec![], XI_SET.to_vec()),
        FigId::Fig8 => (colocated_config(2.5, trans), Axis::DeltaAC, quarter_grid(1, 80), Regime::Transition, vec![], XI_SET.to_vec()),
        FigId::Fig9 => (colocated_config(2.5, trans), Axis::DeltaCA, quarter_grid(1, 19), Regime::Transition, vec![], XI_SET.to_vec()),
    };
    let cfg = axis.apply(&cfg, grid[0]);
    let spec = SweepSpec {
        preset: PresetRef::Figure(fig),
        axis,
        grid,
        regimes: vec![Regime::Baseline, regime],
        output_path: None,
        gaps,
        xis,
        lambda: None,
    };
    (cfg, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::validate_scenario;

    #[test]
    fn parse_ids() {
        assert_eq!(FigId::parse("Fig2").unwrap(), FigId::Fig2);
        assert_eq!(FigId::parse("fig-6like").unwrap(), FigId::Fig6like);
        assert!(FigId::parse("Fig4").is_err());
        for f in FigId::ALL {
            assert_eq!(FigId::parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn presets_are_valid() {
        for f in FigId::ALL {
            let (cfg, spec) = preset(f);
            spec.validate().unwrap();
            for v in [spec.grid[0], *spec.grid.last().unwrap()] {
                validate_scenario(spec.axis.apply(&cfg, v)).unwrap();
            }
        }
    }

    #[test]
    fn fig2_geometry() {
        let (c, s) = preset(FigId::Fig2);
        assert_eq!(c.det_a.distance_to(&c.det_b), 5.0);
        assert_eq!(c.det_a.distance_to(&c.det_c), 2.5);
        assert_eq!(c.det_b.distance_to(&c.det_c), 2.5);
        assert_eq!(c.det_a.switch_peak, c.det_b.switch_peak);
        assert_eq!(s.axis, Axis::DeltaAC);
        assert_eq!(s.regimes, vec![Regime::Baseline, Regime::Orthogonal]);
        let c10 = s.axis.apply(&c, 10.0);
        assert_eq!(c10.det_a.switch_peak - c10.det_c.switch_peak, 10.0);
    }

    #[test]
    fn fig5_and_fig9_geometry() {
        let (c, s) = preset(FigId::Fig5);
        assert_eq!(c.det_a.distance_to(&c.det_b), 0.0);
        assert_eq!(c.det_b.switch_peak - c.det_a.switch_peak, 5.0);
        assert!(s.grid[0] > 0.0);
        let (c, s) = preset(FigId::Fig9);
        assert_eq!(s.axis, Axis::DeltaCA);
        assert!(s.grid.iter().all(|&x| x > 0.0 && x < 5.0));
        assert_eq!(s.regimes[1], Regime::Transition);
        assert_eq!(c.measurement.epsilon, c.coupling);
    }

    #[test]
    fn spec_rejects_bad_grid() {
        let (_, mut s) = preset(FigId::Fig2);
        s.grid = vec![1.0, 1.0];
        assert!(s.validate().is_err());
        s.grid = vec![];
        assert!(s.validate().is_err());
    }
}
