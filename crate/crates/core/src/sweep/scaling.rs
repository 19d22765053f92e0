use rayon::prelude::*;
use serde::Serialize;

use super::config::SweepConfig;
use super::frequency::{sweep_one, GammaMax};
use super::point::Prepared;
use crate::analysis::{fit_nu, nu1_analytic, NuFit};
use crate::schedule::ScheduleKind;
use crate::{Error, Result};

/// Wires shorter than this are left out of the ν fit.
pub const MIN_FIT_LENGTH: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub schedule: ScheduleKind,
    /// (N, Γ_max) per wire length.
    pub gamma_max: Vec<(usize, GammaMax)>,
    pub fit: Option<NuFit<f64>>,
    pub fit_error: Option<String>,
    pub nu1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WireScaling {
    pub config: SweepConfig,
    pub version: &'static str,
    pub lengths: Vec<usize>,
    pub rows: Vec<ScalingRow>,
}

/// Γ_max of coherent Wire-N runs for each schedule, and the fitted ν of the
/// wire rate model against its large-N analytic value.
pub fn wire_scaling_run(lengths: &[usize], kinds: &[ScheduleKind], base: &SweepConfig) -> Result<WireScaling> {
    if lengths.iter().filter(|&&n| n >= MIN_FIT_LENGTH).count() < 3 {
        return Err(Error::InvalidParameter(format!("need at least three wire lengths ≥ {MIN_FIT_LENGTH}")));
    }
    let jobs: Vec<(ScheduleKind, usize)> = kinds.iter().flat_map(|&k| lengths.iter().map(move |&n| (k, n))).collect();
    let results = jobs
        .par_iter()
        .map(|&(kind, n)| {
            let mut cfg = base.clone();
            cfg.device = format!("wire-{n}");
            cfg.schedule.kind = kind;
            cfg.dissipation = "none".into();
            cfg.betas = None;
            cfg.validate()?;
            let prep = Prepared::new(&cfg)?;
            let run = sweep_one(&prep, &cfg, crate::icha::EtaKind::None, 0.0);
            let gm = run.gamma_max.get(cfg.metric).copied().ok_or_else(|| Error::InvalidParameter("metric unavailable".into()))?;
            Ok((kind, n, gm))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let gamma_max: Vec<(usize, GammaMax)> = results.iter().filter(|r| r.0 == kind).map(|r| (r.1, r.2)).collect();
        let pts: Vec<(usize, f64)> = gamma_max.iter().filter_map(|(n, g)| g.gamma_max.map(|v| (*n, v))).collect();
        let (fit, fit_error) = match fit_nu(&pts, base.schedule.alpha1, base.threshold, MIN_FIT_LENGTH) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        rows.push(ScalingRow { schedule: kind, gamma_max, fit, fit_error, nu1: nu1_analytic(kind, base.schedule.alpha0, base.schedule.alpha1)? });
    }
    Ok(WireScaling { config: base.clone(), version: env!("CARGO_PKG_VERSION"), lengths: lengths.to_vec(), rows })
}
