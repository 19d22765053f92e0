use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::icha::EtaKind;
use crate::network::DeviceSpec;
use crate::schedule::{ScheduleKind, ScheduleSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Exact density operator / wavefunction.
    #[default]
    Dense,
    /// Per-cell coherence vectors.
    Icha,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" | "lvn" | "exact" => Ok(Engine::Dense),
            "icha" => Ok(Engine::Icha),
            _ => Err(Error::InvalidParameter(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "q_a")]
    Adiabatic,
    #[serde(rename = "q_cl")]
    Classical,
    #[default]
    #[serde(rename = "q_l")]
    Logical,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Adiabatic, Metric::Classical, Metric::Logical];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Adiabatic => "q_a",
            Metric::Classical => "q_cl",
            Metric::Logical => "q_l",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "qa" | "adiabatic" => Ok(Metric::Adiabatic),
            "qcl" | "classical" => Ok(Metric::Classical),
            "ql" | "logical" => Ok(Metric::Logical),
            _ => Err(Error::InvalidParameter(format!("unknown metric `{s}`"))),
        }
    }
}

/// `points` log-spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let g = Self { min, max, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min > 0.0 && self.max.is_finite() && self.points >= 1 && (self.max > self.min || self.points == 1 && self.max == self.min);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad log grid {} .. {} ({} points)", self.min, self.max, self.points)))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (l0, l1) = (self.min.ln(), self.max.ln());
        (0..self.points)
            .map(|k| match k {
                0 => self.min,
                k if k == self.points - 1 => self.max,
                k => (l0 + (l1 - l0) * k as f64 / (self.points - 1) as f64).exp(),
            })
            .collect()
    }

    /// 61 points over [1e-4, 1].
    pub fn default_gamma() -> Self {
        default_gamma()
    }

    /// 41 points over [1e-5, 1].
    pub fn default_delta() -> Self {
        default_delta()
    }

    /// Ratio between neighbouring points.
    pub fn step_ratio(&self) -> f64 {
        if self.points < 2 { 1.0 } else { (self.max / self.min).powf(1.0 / (self.points - 1) as f64) }
    }
}

fn default_gamma() -> LogGrid {
    LogGrid { min: 1e-4, max: 1.0, points: 61 }
}

fn default_delta() -> LogGrid {
    LogGrid { min: 1e-5, max: 1.0, points: 41 }
}

fn default_threshold() -> f64 {
    0.99
}

fn default_dissipation() -> String {
    "none".into()
}

fn default_schedule() -> ScheduleSpec {
    ScheduleSpec::new(ScheduleKind::QuasiLinear)
}

/// One sweep, as read from a JSON document or assembled from CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub device: String,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleSpec,
    /// `none`, `ground`, `classical`, `boltzmann:beta=..` or `meanfield:beta=..`.
    #[serde(default = "default_dissipation")]
    pub dissipation: String,
    /// Replaces β of the dissipation for each entry in turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    /// δ used when no δ grid is given.
    #[serde(default)]
    pub rate: f64,
    #[serde(default = "default_gamma")]
    pub gamma: LogGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<LogGrid>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// DOPRI tolerances of the dense engine.
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-10
}

impl SweepConfig {
    pub fn new(device: impl Into<String>) -> Self {
        Self {
            device: device.into(),
            engine: Engine::Dense,
            schedule: default_schedule(),
            dissipation: default_dissipation(),
            betas: None,
            rate: 0.0,
            gamma: default_gamma(),
            delta: None,
            metric: Metric::Logical,
            threshold: default_threshold(),
            rtol: default_rtol(),
            atol: default_atol(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn device_spec(&self) -> Result<DeviceSpec> {
        self.device.parse()
    }

    pub fn eta_kind(&self) -> Result<EtaKind<f64>> {
        self.dissipation.parse()
    }

    /// The dissipation kinds to run: one per β override, or the configured one.
    pub fn eta_kinds(&self) -> Result<Vec<EtaKind<f64>>> {
        let base = self.eta_kind()?;
        let Some(betas) = &self.betas else {
            return Ok(vec![base]);
        };
        betas
            .iter()
            .map(|&beta| match base {
                EtaKind::MeanField { .. } => Ok(EtaKind::MeanField { beta }),
                EtaKind::Spectral(crate::lvn::Relaxation::Boltzmann { .. }) => {
                    Ok(EtaKind::Spectral(crate::lvn::Relaxation::Boltzmann { beta }))
                }
                _ => Err(Error::InvalidParameter("a β list needs a boltzmann or meanfield dissipation".into())),
            })
            .collect()
    }

    /// Text form of one dissipation kind, as accepted by [`Self::dissipation`].
    pub fn dissipation_label(&self, kind: &EtaKind<f64>) -> String {
        use crate::lvn::Relaxation;
        match kind {
            EtaKind::None | EtaKind::Spectral(Relaxation::None) => "none".into(),
            EtaKind::MeanField { beta } => format!("meanfield:beta={beta}"),
            EtaKind::Spectral(Relaxation::Boltzmann { beta }) => format!("boltzmann:beta={beta}"),
            EtaKind::Spectral(Relaxation::Ground) => "ground".into(),
            EtaKind::Spectral(Relaxation::Classical) => "classical".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.device_spec()?;
        self.schedule.unsmoothed::<f64>()?;
        self.eta_kinds()?;
        self.gamma.validate()?;
        if let Some(d) = &self.delta {
            d.validate()?;
        }
        if !(self.rate >= 0.0) {
            return Err(Error::InvalidParameter("dissipation rate must be non-negative".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidParameter("threshold must lie in (0, 1)".into()));
        }
        if self.engine == Engine::Dense && matches!(self.eta_kind()?, EtaKind::MeanField { .. }) {
            return Err(Error::InvalidParameter("mean-field dissipation needs the icha engine".into()));
        }
        if self.engine == Engine::Icha && self.metric == Metric::Adiabatic {
            return Err(Error::InvalidParameter("Q_A is not available from the icha engine".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = LogGrid::new(1e-4, 1.0, 61).unwrap();
        let v = g.values();
        assert_eq!((v[0], v[60], v.len()), (1e-4, 1.0, 61));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!((g.step_ratio().powi(60) - 1e4).abs() < 1e-8);
        assert!(LogGrid::new(1.0, 0.1, 3).is_err());
    }

    #[test]
    fn config_defaults_and_round_trip() {
        let cfg = SweepConfig::from_json(r#"{"device": "maj-101", "dissipation": "boltzmann:beta=10", "betas": [5, 20]}"#).unwrap();
        assert_eq!(cfg.gamma.points, 61);
        assert_eq!(cfg.metric, Metric::Logical);
        assert_eq!(cfg.eta_kinds().unwrap().len(), 2);
        let back = SweepConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(SweepConfig::from_json(r#"{"device": "wire-3", "dissipation": "meanfield:beta=3"}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"device": "wire-0"}"#).is_err());
    }
}
