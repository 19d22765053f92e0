use rayon::prelude::*;

use super::{symmetric_eigen, IsingFamily, MAX_DENSE_CELLS};
use crate::network::QcaNetwork;
use crate::schedule::Schedule;
use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice<T> {
    pub s: T,
    pub eigenvalues: Vec<T>,
    /// E1 − E0.
    pub gap: T,
    pub ground_degeneracy: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumSweep<T> {
    pub slices: Vec<SpectrumSlice<T>>,
    /// Grid index of the smallest gap.
    pub argmin: usize,
}

impl<T: Real> SpectrumSweep<T> {
    pub fn min_gap(&self) -> &SpectrumSlice<T> {
        &self.slices[self.argmin]
    }
}

pub fn spectrum_slice<T: Real>(fam: &IsingFamily<T>, sched: &Schedule<T>, s: T, m: usize) -> Result<SpectrumSlice<T>> {
    let (a, b) = sched.evaluate(s)?;
    let eig = symmetric_eigen(&fam.dense(a, b), m.max(2).min(fam.dim()))?;
    let mut eigenvalues = eig.values.clone();
    let gap = eig.gap().unwrap_or_else(T::zero);
    let ground_degeneracy = eig.ground_degeneracy();
    eigenvalues.truncate(m);
    Ok(SpectrumSlice { s, eigenvalues, gap, ground_degeneracy })
}

/// Lowest `m` levels on a uniform grid of `grid` points over s ∈ [0, 1].
pub fn spectrum_sweep<T: Real>(net: &QcaNetwork<T>, sched: &Schedule<T>, grid: usize, m: usize) -> Result<SpectrumSweep<T>> {
    if grid < 3 {
        return Err(Error::InvalidParameter("spectrum grid needs at least 3 points".into()));
    }
    let fam = IsingFamily::new(net, MAX_DENSE_CELLS)?;
    if m == 0 || m > fam.dim() {
        return Err(Error::InvalidParameter(format!("cannot take {m} levels of a {}-level system", fam.dim())));
    }
    let last = T::of((grid - 1) as f64);
    let slices = (0..grid)
        .into_par_iter()
        .map(|k| {
            let s = if k == grid - 1 { T::one() } else { T::of(k as f64) / last };
            spectrum_slice(&fam, sched, s, m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut argmin = 0;
    for (k, sl) in slices.iter().enumerate() {
        if sl.gap < slices[argmin].gap {
            argmin = k;
        }
    }
    Ok(SpectrumSweep { slices, argmin })
}
