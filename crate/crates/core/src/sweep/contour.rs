use rayon::prelude::*;
use serde::Serialize;

use super::config::SweepConfig;
use super::frequency::{sweep_one, GammaMax, ThresholdStatus};
use super::point::Prepared;
use crate::icha::EtaKind;
use crate::{Error, Result};

/// A jump in Γ_max by more than this factor between neighbouring δ starts a
/// new contour segment.
const SEGMENT_JUMP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub delta: f64,
    pub gamma_max: Option<f64>,
    pub status: ThresholdStatus,
    pub segment: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContourRun {
    pub dissipation: String,
    pub coherent: GammaMax,
    pub points: Vec<ContourPoint>,
    /// Last good point before the contour was lost, if it was.
    pub lost_after: Option<ContourPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Contour {
    pub config: SweepConfig,
    pub version: &'static str,
    pub runs: Vec<ContourRun>,
}

/// Crossing of the threshold near `seed`: walk up (metric above) or down
/// (below) by `ratio` until the sign changes, then bisect.
fn track_from(prep: &Prepared, cfg: &SweepConfig, kind: EtaKind<f64>, delta: f64, seed: f64) -> (ThresholdStatus, Option<f64>) {
    let ratio = cfg.gamma.step_ratio().max(1.05);
    let (gmin, gmax) = (cfg.gamma.min, cfg.gamma.max);
    let above = |g: f64| -> Option<bool> {
        let p = prep.evaluate(g, delta, kind);
        p.ok().then(|| p.metric(cfg.metric) >= cfg.threshold)
    };
    let mut g = seed.clamp(gmin, gmax);
    let Some(start) = above(g) else {
        return (ThresholdStatus::Failed, None);
    };
    let (mut lo, mut hi);
    if start {
        lo = g;
        loop {
            if g >= gmax {
                return (ThresholdStatus::NeverBelow, None);
            }
            g = (g * ratio).min(gmax);
            match above(g) {
                None => return (ThresholdStatus::Failed, None),
                Some(true) => lo = g,
                Some(false) => {
                    hi = g;
                    break;
                }
            }
        }
    } else {
        hi = g;
        loop {
            if g <= gmin {
                return (ThresholdStatus::NeverAbove, None);
            }
            g = (g / ratio).max(gmin);
            match above(g) {
                None => return (ThresholdStatus::Failed, None),
                Some(false) => hi = g,
                Some(true) => {
                    lo = g;
                    break;
                }
            }
        }
    }
    while hi / lo > 1.0 + 1e-3 {
        let mid = (lo * hi).sqrt();
        match above(mid) {
            None => return (ThresholdStatus::Failed, None),
            Some(true) => lo = mid,
            Some(false) => hi = mid,
        }
    }
    (ThresholdStatus::Found, Some((lo * hi).sqrt()))
}

fn track(prep: &Prepared, cfg: &SweepConfig, kind: EtaKind<f64>, deltas: &[f64]) -> Result<ContourRun> {
    let coherent = sweep_one(prep, cfg, kind, 0.0).gamma_max.get(cfg.metric).copied();
    let coherent = coherent.ok_or_else(|| Error::InvalidParameter(format!("metric {} unavailable", cfg.metric)))?;
    let Some(g0) = coherent.gamma_max else {
        return Err(Error::InvalidParameter(format!("no coherent-limit Γ_max ({:?})", coherent.status)));
    };
    let mut points = Vec::with_capacity(deltas.len());
    let mut seed = g0;
    let mut prev = Some(g0);
    let mut segment = 0;
    let mut lost_after = None;
    for &d in deltas {
        let (status, gm) = track_from(prep, cfg, kind, d, seed);
        match (prev, gm) {
            (Some(p), Some(g)) if g / p > SEGMENT_JUMP || p / g > SEGMENT_JUMP => segment += 1,
            (None, Some(_)) => segment += 1,
            _ => {}
        }
        let pt = ContourPoint { delta: d, gamma_max: gm, status, segment };
        if gm.is_none() && status != ThresholdStatus::NeverBelow && lost_after.is_none() {
            lost_after = points.iter().rev().find(|p: &&ContourPoint| p.gamma_max.is_some()).copied();
        }
        if let Some(g) = gm {
            seed = g;
        }
        prev = gm;
        points.push(pt);
    }
    Ok(ContourRun { dissipation: cfg.dissipation_label(&kind), coherent, points, lost_after })
}

/// Tracks the threshold contour Γ_max(δ) over ascending δ, starting from the
/// coherent-limit Γ_max and seeding each δ with the previous crossing.
pub fn contour_track(cfg: &SweepConfig) -> Result<Contour> {
    cfg.validate()?;
    let dgrid = cfg.delta.ok_or_else(|| Error::InvalidParameter("contour tracking needs a δ grid".into()))?;
    let prep = Prepared::new(cfg)?;
    let deltas = dgrid.values();
    let runs = cfg.eta_kinds()?.into_par_iter().map(|k| track(&prep, cfg, k, &deltas)).collect::<Result<Vec<_>>>()?;
    Ok(Contour { config: cfg.clone(), version: env!("CARGO_PKG_VERSION"), runs })
}
