use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::SpectrumSweep;
use crate::fit::{levenberg_marquardt, LmOptions};
use crate::scalar::Real;
use crate::{Error, Result};

/// Fit window around the grid minimum, in units of s.
pub const DEFAULT_FIT_WINDOW: f64 = 0.07;

/// Hyperbolic avoided crossing Δ(s) = Δ0·sqrt(1 + (s − s0)²/W²).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapFit<T> {
    pub delta0: T,
    /// None when the minimum sits on the domain boundary.
    pub width: Option<T>,
    pub s0: T,
    /// Two-sigma uncertainties from the fit covariance.
    pub delta0_uncertainty: Option<T>,
    pub width_uncertainty: Option<T>,
    pub at_boundary: bool,
    pub points: usize,
}

pub fn hyperbola<T: Real>(s: T, delta0: T, width: T, s0: T) -> T {
    let x = (s - s0) / width;
    delta0 * (T::one() + x * x).sqrt()
}

/// Fits the hyperbola to the gaps within `window` of the grid minimum.
pub fn fit_min_gap<T: Real>(sweep: &SpectrumSweep<T>, window: T) -> Result<GapFit<T>> {
    let k = sweep.argmin;
    let n = sweep.slices.len();
    let best = &sweep.slices[k];
    if k == 0 || k == n - 1 {
        return Ok(GapFit {
            delta0: best.gap,
            width: None,
            s0: best.s,
            delta0_uncertainty: None,
            width_uncertainty: None,
            at_boundary: true,
            points: 1,
        });
    }
    let pts: Vec<(T, T)> =
        sweep.slices.iter().filter(|sl| (sl.s - best.s).abs() <= window).map(|sl| (sl.s, sl.gap)).collect();
    fit_hyperbola(&pts, best.s)
}

/// Least-squares hyperbola through (s, gap) points; `s_guess` seeds s0.
pub fn fit_hyperbola<T: Real>(pts: &[(T, T)], s_guess: T) -> Result<GapFit<T>> {
    if pts.len() < 8 {
        return Err(Error::InvalidParameter(format!("gap fit needs at least 8 points, got {}", pts.len())));
    }
    let d0 = pts.iter().map(|p| p.1).fold(pts[0].1, |a, b| a.min(b));
    // width guess from the window edges
    let mut w_acc = T::zero();
    let mut w_cnt = 0;
    for &(s, g) in [pts[0], pts[pts.len() - 1]].iter() {
        let ratio = g / d0;
        if ratio > T::one() + T::of(1e-9) {
            w_acc += (s - s_guess).abs() / (ratio * ratio - T::one()).sqrt();
            w_cnt += 1;
        }
    }
    let w0 = if w_cnt > 0 { w_acc / T::of(w_cnt as f64) } else { T::one() };
    let fit = levenberg_marquardt(
        |p: &[T], r: &mut DVector<T>, j: &mut DMatrix<T>| {
            let (dd, w, s0) = (p[0], p[1], p[2]);
            for (i, &(s, g)) in pts.iter().enumerate() {
                let x = (s - s0) / w;
                let root = (T::one() + x * x).sqrt();
                r[i] = dd * root - g;
                j[(i, 0)] = root;
                j[(i, 1)] = -dd * x * x / (w * root);
                j[(i, 2)] = -dd * x / (w * root);
            }
        },
        &[d0, w0, s_guess],
        pts.len(),
        LmOptions::default(),
    )?;
    let two = T::of(2.0);
    let (delta0, width) = (fit.params[0], fit.params[1].abs());
    if !(delta0 > T::zero()) {
        return Err(Error::Convergence { what: "gap fit (nonpositive minimum)", residual: fit.cost.as_f64() });
    }
    Ok(GapFit {
        delta0,
        width: Some(width),
        s0: fit.params[2],
        delta0_uncertainty: Some(two * fit.std_error(0)),
        width_uncertainty: Some(two * fit.std_error(1)),
        at_boundary: false,
        points: pts.len(),
    })
}
