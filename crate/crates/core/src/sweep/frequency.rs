use rayon::prelude::*;
use serde::Serialize;

use super::config::{Metric, SweepConfig};
use super::point::{PointResult, Prepared};
use crate::icha::EtaKind;
use crate::Result;

/// Relative width at which threshold bisection stops.
const BISECTION_RTOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    /// Crossing bracketed on the grid and refined.
    Found,
    /// Already below threshold at the smallest Γ.
    NeverAbove,
    /// Above threshold over the whole grid; Γ_max exceeds its top.
    NeverBelow,
    /// A point needed for the bracket or bisection failed.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaMax {
    pub status: ThresholdStatus,
    pub gamma_max: Option<f64>,
    /// Operating frequency Γ_max/4 of four-phase clocking.
    pub operating: Option<f64>,
    /// Bisection bracket [Γ_lo (above), Γ_hi (below)].
    pub bracket: Option<(f64, f64)>,
}

impl GammaMax {
    fn status(status: ThresholdStatus) -> Self {
        Self { status, gamma_max: None, operating: None, bracket: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaMaxSet {
    pub q_a: Option<GammaMax>,
    pub q_cl: GammaMax,
    pub q_l: GammaMax,
}

impl GammaMaxSet {
    pub fn get(&self, m: Metric) -> Option<&GammaMax> {
        match m {
            Metric::Adiabatic => self.q_a.as_ref(),
            Metric::Classical => Some(&self.q_cl),
            Metric::Logical => Some(&self.q_l),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencySweep {
    pub config: SweepConfig,
    pub version: &'static str,
    /// One entry per dissipation kind (β list), each over the Γ grid.
    pub runs: Vec<FrequencyRun>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyRun {
    pub dissipation: String,
    pub delta: f64,
    pub points: Vec<PointResult>,
    pub gamma_max: GammaMaxSet,
}

/// Left-most downward crossing of `threshold` on an ascending Γ scan, refined
/// by log bisection; later re-crossings are ignored.
pub fn refine_threshold(
    points: &[PointResult],
    metric: Metric,
    threshold: f64,
    mut eval: impl FnMut(f64) -> PointResult,
) -> GammaMax {
    let Some(first) = points.first() else {
        return GammaMax::status(ThresholdStatus::Failed);
    };
    if !first.ok() {
        return GammaMax::status(ThresholdStatus::Failed);
    }
    if first.metric(metric) < threshold {
        return GammaMax::status(ThresholdStatus::NeverAbove);
    }
    let Some(k) = points.iter().position(|p| !p.ok() || p.metric(metric) < threshold) else {
        return GammaMax::status(ThresholdStatus::NeverBelow);
    };
    if !points[k].ok() {
        return GammaMax::status(ThresholdStatus::Failed);
    }
    let (mut lo, mut hi) = (points[k - 1].gamma, points[k].gamma);
    while hi / lo > 1.0 + BISECTION_RTOL {
        let mid = (lo * hi).sqrt();
        let p = eval(mid);
        if !p.ok() {
            return GammaMax { bracket: Some((lo, hi)), ..GammaMax::status(ThresholdStatus::Failed) };
        }
        if p.metric(metric) >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = (lo * hi).sqrt();
    GammaMax { status: ThresholdStatus::Found, gamma_max: Some(g), operating: Some(g / 4.0), bracket: Some((lo, hi)) }
}

pub(super) fn sweep_one(prep: &Prepared, cfg: &SweepConfig, kind: EtaKind<f64>, delta: f64) -> FrequencyRun {
    let gammas = cfg.gamma.values();
    let points: Vec<PointResult> = gammas.par_iter().map(|&g| prep.evaluate(g, delta, kind)).collect();
    let thr = cfg.threshold;
    let eval = |g: f64| prep.evaluate(g, delta, kind);
    let dense = points.iter().all(|p| !p.ok() || p.q_a.is_finite());
    // the three bisections are independent
    let (q_a, (q_cl, q_l)) = rayon::join(
        || dense.then(|| refine_threshold(&points, Metric::Adiabatic, thr, eval)),
        || {
            rayon::join(
                || refine_threshold(&points, Metric::Classical, thr, eval),
                || refine_threshold(&points, Metric::Logical, thr, eval),
            )
        },
    );
    FrequencyRun { dissipation: cfg.dissipation_label(&kind), delta, points, gamma_max: GammaMaxSet { q_a, q_cl, q_l } }
}

/// Metrics over the Γ grid at fixed δ (`cfg.rate`), with Γ_max for each metric.
pub fn frequency_sweep(cfg: &SweepConfig) -> Result<FrequencySweep> {
    cfg.validate()?;
    let prep = Prepared::new(cfg)?;
    let runs = cfg.eta_kinds()?.into_iter().map(|k| sweep_one(&prep, cfg, k, cfg.rate)).collect();
    Ok(FrequencySweep { config: cfg.clone(), version: env!("CARGO_PKG_VERSION"), runs })
}
