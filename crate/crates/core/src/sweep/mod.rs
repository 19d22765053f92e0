//! Experiment orchestration over (Γ, δ, β, N): threshold extraction with
//! left-most-intercept semantics, 2-D maps, contour tracking and wire scaling.
//! Double precision throughout.

mod config;
mod contour;
mod frequency;
mod map;
pub mod output;
mod point;
mod scaling;

pub use config::{Engine, LogGrid, Metric, SweepConfig};
pub use contour::{contour_track, Contour, ContourPoint};
pub use frequency::{frequency_sweep, refine_threshold, FrequencySweep, GammaMax, GammaMaxSet, ThresholdStatus};
pub use map::{map_2d, Map2d};
pub use point::{PointResult, Prepared};
pub use scaling::{wire_scaling_run, ScalingRow, WireScaling};

/// Runs `f` on a pool of `threads` workers (None: rayon's default).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> crate::Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| crate::Error::InvalidParameter(format!("thread pool: {e}"))),
    }
}
