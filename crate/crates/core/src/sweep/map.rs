use rayon::prelude::*;
use serde::Serialize;

use super::config::SweepConfig;
use super::point::{PointResult, Prepared};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct MapRun {
    pub dissipation: String,
    /// δ-major: the coherent row δ = 0 first, then each δ of the grid over all Γ.
    pub points: Vec<PointResult>,
    /// Whether each point sits on the δ = Γ diagonal to grid resolution.
    pub on_diagonal: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Map2d {
    pub config: SweepConfig,
    pub version: &'static str,
    pub gammas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub runs: Vec<MapRun>,
}

impl Map2d {
    /// Metric matrix rows (δ = 0 first) for one run.
    pub fn rows(&self, run: usize) -> Vec<&[PointResult]> {
        self.runs[run].points.chunks(self.gammas.len()).collect()
    }
}

/// Metrics on the full (Γ, δ) product grid, in parallel over points.
pub fn map_2d(cfg: &SweepConfig) -> Result<Map2d> {
    cfg.validate()?;
    let dgrid = cfg.delta.ok_or_else(|| Error::InvalidParameter("a 2-D map needs a δ grid".into()))?;
    let prep = Prepared::new(cfg)?;
    let gammas = cfg.gamma.values();
    let deltas = dgrid.values();
    let half_step = 0.5 * cfg.gamma.step_ratio().max(dgrid.step_ratio()).ln();
    let mut pairs = Vec::with_capacity((deltas.len() + 1) * gammas.len());
    for &d in std::iter::once(&0.0).chain(&deltas) {
        for &g in &gammas {
            pairs.push((g, d));
        }
    }
    let on_diagonal: Vec<bool> = pairs.iter().map(|&(g, d)| d > 0.0 && (d / g).ln().abs() <= half_step + 1e-12).collect();
    let runs = cfg
        .eta_kinds()?
        .into_iter()
        .map(|kind| {
            let points = pairs.par_iter().map(|&(g, d)| prep.evaluate(g, d, kind)).collect();
            MapRun { dissipation: cfg.dissipation_label(&kind), points, on_diagonal: on_diagonal.clone() }
        })
        .collect();
    Ok(Map2d { config: cfg.clone(), version: env!("CARGO_PKG_VERSION"), gammas, deltas, runs })
}
