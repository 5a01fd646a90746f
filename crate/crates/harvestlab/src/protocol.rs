//! Experiment description. Times and lengths are in units of the switching
//! width T (T = 1), gaps in units of 1/T, and the coupling is dimensionless.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How long after its switching peak a detector counts as decoupled.
pub const DECOUPLING_DELAY: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub gap: f64,
    pub position: [f64; 3],
    pub switch_peak: f64,
}

impl DetectorParams {
    pub fn new(gap: f64, position: [f64; 3], switch_peak: f64) -> Self {
        DetectorParams { gap, position, switch_peak }
    }

    pub fn distance_to(&self, other: &DetectorParams) -> f64 {
        let d: f64 = self
            .position
            .iter()
            .zip(other.position.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        d.sqrt()
    }

    fn violations(&self, name: &str, out: &mut Vec<String>) {
        if !self.gap.is_finite() || self.gap < 0.0 {
            out.push(format!("{name}: gap must be finite and non-negative (got {})", self.gap));
        }
        if self.position.iter().any(|x| !x.is_finite()) {
            out.push(format!("{name}: position must be finite"));
        }
        if !self.switch_peak.is_finite() {
            out.push(format!("{name}: switch_peak must be finite"));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementKind {
    None,
    Selective,
    NonSelective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub kind: MeasurementKind,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub xi: f64,
    pub measurement_time: f64,
}

impl MeasurementSpec {
    pub fn none(measurement_time: f64) -> Self {
        MeasurementSpec { kind: MeasurementKind::None, epsilon: 0.0, xi: 0.0, measurement_time }
    }

    pub fn selective(epsilon: f64, xi: f64, measurement_time: f64) -> Self {
        MeasurementSpec { kind: MeasurementKind::Selective, epsilon, xi, measurement_time }
    }

    pub fn non_selective(measurement_time: f64) -> Self {
        MeasurementSpec { kind: MeasurementKind::NonSelective, epsilon: 0.0, xi: 0.0, measurement_time }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    NonOrthogonal,
    Orthogonal,
    Transition,
    Baseline,
    NonSelective,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::Baseline,
        Regime::NonSelective,
        Regime::NonOrthogonal,
        Regime::Orthogonal,
        Regime::Transition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::NonOrthogonal => "non_orthogonal",
            Regime::Orthogonal => "orthogonal",
            Regime::Transition => "transition",
            Regime::Baseline => "baseline",
            Regime::NonSelective => "non_selective",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        let k: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Regime::ALL.into_iter().find(|r| r.name().replace('_', "") == k)
    }

    pub fn is_selective(self) -> bool {
        matches!(self, Regime::NonOrthogonal | Regime::Orthogonal | Regime::Transition)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(rename = "detA")]
    pub det_a: DetectorParams,
    #[serde(rename = "detB")]
    pub det_b: DetectorParams,
    #[serde(rename = "detC")]
    pub det_c: DetectorParams,
    pub coupling: f64,
    pub measurement: MeasurementSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime_override: Option<Regime>,
}

impl ScenarioConfig {
    /// Regime the state is assembled under: the override if present,
    /// otherwise what the measurement kind and (epsilon, coupling) imply.
    pub fn regime(&self) -> Result<Regime> {
        if let Some(r) = self.regime_override {
            return Ok(r);
        }
        self.classified_regime()
    }

    pub fn classified_regime(&self) -> Result<Regime> {
        match self.measurement.kind {
            MeasurementKind::None => Ok(Regime::Baseline),
            MeasurementKind::NonSelective => Ok(Regime::NonSelective),
            MeasurementKind::Selective => classify_regime(self.measurement.epsilon, self.coupling),
        }
    }

    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(vec![format!("scenario document: {e}")]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        ScenarioConfig::from_json(&text)
    }
}

/// Point-wise regime of a selective measurement with overlap epsilon.
pub fn classify_regime(epsilon: f64, lambda: f64) -> Result<Regime> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("coupling {lambda} must lie in (0, 1)")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon {epsilon} must lie in [0, 1]")));
    }
    if epsilon >= lambda.sqrt() {
        Ok(Regime::NonOrthogonal)
    } else if epsilon <= lambda.powf(1.5) {
        Ok(Regime::Orthogonal)
    } else {
        Ok(Regime::Transition)
    }
}

/// Returns the config unchanged, or every violated invariant at once.
pub fn validate_scenario(cfg: ScenarioConfig) -> Result<ScenarioConfig> {
    let mut v = Vec::new();
    cfg.det_a.violations("detA", &mut v);
    cfg.det_b.violations("detB", &mut v);
    cfg.det_c.violations("detC", &mut v);
    if !cfg.coupling.is_finite() || cfg.coupling <= 0.0 {
        v.push("coupling must be positive".to_string());
    } else if cfg.coupling > 0.3 {
        v.push(format!("coupling {} exceeds 0.3", cfg.coupling));
    }
    let m = &cfg.measurement;
    if !(0.0..=1.0).contains(&m.epsilon) {
        v.push(format!("epsilon must lie in [0, 1] (got {})", m.epsilon));
    }
    if !(0.0..std::f64::consts::TAU).contains(&m.xi) {
        v.push(format!("xi must lie in [0, 2pi) (got {})", m.xi));
    }
    if !m.measurement_time.is_finite() {
        v.push("measurement_time must be finite".to_string());
    } else if m.measurement_time < cfg.det_c.switch_peak + DECOUPLING_DELAY {
        v.push(format!(
            "measurement_time {} is earlier than t_C + 5T = {}; detector C is not yet decoupled",
            m.measurement_time,
            cfg.det_c.switch_peak + DECOUPLING_DELAY
        ));
    }
    if let Some(r) = cfg.regime_override {
        let ok = match m.kind {
            MeasurementKind::None => r == Regime::Baseline,
            MeasurementKind::NonSelective => r == Regime::NonSelective,
            MeasurementKind::Selective => r.is_selective(),
        };
        if !ok {
            v.push(format!("regime override {r} does not match measurement kind {:?}", m.kind));
        }
    }
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Invalid(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(x: f64, t: f64) -> DetectorParams {
        DetectorParams::new(2.5, [x, 0.0, 0.0], t)
    }

    fn cfg() -> ScenarioConfig {
        ScenarioConfig {
            det_a: det(-2.5, 0.0),
            det_b: det(2.5, 0.0),
            det_c: det(0.0, -3.0),
            coupling: 0.01,
            measurement: MeasurementSpec::selective(0.0, 0.0, 10.0),
            regime_override: None,
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_regime(0.5, 0.01).unwrap(), Regime::NonOrthogonal);
        assert_eq!(classify_regime(0.0, 0.01).unwrap(), Regime::Orthogonal);
        assert_eq!(classify_regime(0.01, 0.01).unwrap(), Regime::Transition);
        assert!(classify_regime(0.1, 1.0).is_err());
        assert!(classify_regime(1.1, 0.1).is_err());
    }

    #[test]
    fn exponent_table() {
        let lam: f64 = 1e-2;
        for (d, r) in [
            (0.0, Regime::NonOrthogonal),
            (0.25, Regime::NonOrthogonal),
            (0.4, Regime::NonOrthogonal),
            (0.75, Regime::Transition),
            (1.0, Regime::Transition),
            (1.25, Regime::Transition),
            (1.75, Regime::Orthogonal),
            (2.0, Regime::Orthogonal),
        ] {
            assert_eq!(classify_regime(lam.powf(d), lam).unwrap(), r, "delta {d}");
        }
    }

    #[test]
    fn validation_collects_everything() {
        let mut c = cfg();
        c.coupling = 0.0;
        c.measurement.measurement_time = c.det_c.switch_peak + 1.0;
        match validate_scenario(c) {
            Err(Error::Invalid(v)) => {
                assert_eq!(v.len(), 2);
                assert!(v.iter().any(|s| s == "coupling must be positive"));
                assert!(v.iter().any(|s| s.contains("t_C + 5T")));
            }
            other => panic!("{other:?}"),
        }
        assert!(validate_scenario(cfg()).is_ok());
    }

    #[test]
    fn json_roundtrip() {
        let c = cfg();
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
        assert!(c.to_json().contains("\"switch_peak\""));
    }

    #[test]
    fn regime_names_parse() {
        for r in Regime::ALL {
            assert_eq!(Regime::parse(r.name()), Some(r));
        }
        assert_eq!(Regime::parse("NonSelective"), Some(Regime::NonSelective));
    }
}
