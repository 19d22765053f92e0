use serde::Serialize;

use super::config::{Engine, Metric, SweepConfig};
use crate::icha::{DissipationVectorSpec, EtaKind, IchaModel, IchaOptions};
use crate::lvn::{DissipationSpec, EvolveOptions, LvnModel, Relaxation};
use crate::network::{build_device, QcaNetwork};
use crate::schedule::ScheduleSpec;
use crate::Result;

/// Finals of one run; failed runs keep their error text instead of aborting
/// the sweep they belong to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub gamma: f64,
    pub delta: f64,
    /// NaN under the icha engine.
    pub q_a: f64,
    pub q_cl: f64,
    pub q_l: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PointResult {
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Adiabatic => self.q_a,
            Metric::Classical => self.q_cl,
            Metric::Logical => self.q_l,
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    fn failed(gamma: f64, delta: f64, err: crate::Error) -> Self {
        Self { gamma, delta, q_a: f64::NAN, q_cl: f64::NAN, q_l: f64::NAN, error: Some(err.to_string()) }
    }
}

enum Model {
    Dense(LvnModel<f64>),
    Icha(IchaModel<f64>),
}

/// A device built once and shared by every point of a sweep.
pub struct Prepared {
    model: Model,
    schedule: ScheduleSpec,
    rtol: f64,
    atol: f64,
}

impl Prepared {
    pub fn new(cfg: &SweepConfig) -> Result<Self> {
        let net: QcaNetwork<f64> = build_device(&cfg.device_spec()?)?;
        Self::from_network(&net, cfg)
    }

    pub fn from_network(net: &QcaNetwork<f64>, cfg: &SweepConfig) -> Result<Self> {
        let model = match cfg.engine {
            Engine::Dense => Model::Dense(LvnModel::new(net)?),
            Engine::Icha => Model::Icha(IchaModel::new(net)?),
        };
        Ok(Self { model, schedule: cfg.schedule, rtol: cfg.rtol, atol: cfg.atol })
    }

    pub fn network(&self) -> &QcaNetwork<f64> {
        match &self.model {
            Model::Dense(m) => m.network(),
            Model::Icha(m) => m.network(),
        }
    }

    fn run(&self, gamma: f64, delta: f64, kind: EtaKind<f64>) -> Result<PointResult> {
        let sched = self.schedule.for_runrate::<f64>(gamma)?;
        let coherent = delta == 0.0 || kind == EtaKind::None;
        match &self.model {
            Model::Dense(m) => {
                let spec = if coherent {
                    DissipationSpec::coherent()
                } else {
                    let relax = match kind {
                        EtaKind::Spectral(r) => r,
                        _ => Relaxation::None,
                    };
                    DissipationSpec::new(relax, delta)?
                };
                let opts = EvolveOptions { rtol: self.rtol, atol: self.atol, sampling: 0, ..Default::default() };
                let tr = m.evolve(&sched, &spec, gamma, &opts)?;
                Ok(PointResult { gamma, delta, q_a: tr.trace.q_a, q_cl: tr.trace.q_cl, q_l: tr.trace.q_l, error: None })
            }
            Model::Icha(m) => {
                let spec = if coherent { DissipationVectorSpec::coherent() } else { DissipationVectorSpec::new(kind, delta)? };
                let tr = m.evolve(&sched, &spec, gamma, &IchaOptions { sampling: 0, ..Default::default() })?;
                Ok(PointResult { gamma, delta, q_a: f64::NAN, q_cl: tr.q_cl, q_l: tr.q_l, error: None })
            }
        }
    }

    /// Finals at one (Γ, δ); errors are folded into the result.
    pub fn evaluate(&self, gamma: f64, delta: f64, kind: EtaKind<f64>) -> PointResult {
        self.run(gamma, delta, kind).unwrap_or_else(|e| PointResult::failed(gamma, delta, e))
    }
}
