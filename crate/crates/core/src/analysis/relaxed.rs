use serde::Serialize;

use crate::icha::mean_field_fixed_point;
use crate::network::{spin, ClassicalGround, QcaNetwork, MAX_ENUMERATION_CELLS};
use crate::quantum::{symmetric_eigen, IsingFamily, MAX_DENSE_CELLS};
use crate::schedule::Drive;
use crate::scalar::Real;
use crate::{Error, Result};

/// Lowest classical excitation whose output logic is wrong.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcitedCensus<T> {
    /// Gap to the ground energy.
    pub delta1: T,
    /// Number of configurations at that gap.
    pub d1: usize,
}

pub fn incorrect_excited_census<T: Real>(net: &QcaNetwork<T>, ground: &ClassicalGround<T>) -> Result<ExcitedCensus<T>> {
    if ground.degenerate {
        return Err(Error::DegenerateGround { count: ground.degeneracy_count });
    }
    let energies = net.classical_energies(MAX_ENUMERATION_CELLS)?;
    let g = ground.config();
    let wrong = |c: usize| net.outputs().iter().any(|&o| spin(c, o) != spin(g, o));
    let (lo, hi) = energies.iter().fold((T::of(f64::INFINITY), T::of(f64::NEG_INFINITY)), |(a, b), &e| (a.min(e), b.max(e)));
    let tol = T::tol(1e-9) * (hi - lo).max(T::one());
    let best = (0..energies.len()).filter(|&c| wrong(c)).map(|c| energies[c]).fold(T::of(f64::INFINITY), |a, e| a.min(e));
    if !best.is_finite() {
        return Err(Error::InvalidParameter("network has no output cells to get wrong".into()));
    }
    let d1 = (0..energies.len()).filter(|&c| wrong(c) && (energies[c] - best).abs() <= tol).count();
    Ok(ExcitedCensus { delta1: best - ground.energy, d1 })
}

/// β* ≈ [ln d1 − ln(1 − target)]/Δ1.
pub fn beta_star<T: Real>(delta1: T, d1: usize, target: T) -> T {
    (T::of(d1 as f64).ln() - (T::one() - target).ln()) / delta1
}

/// Levels of H(1) with ⟨σ_z⟩ of each output cell per level.
struct ThermalTable<T> {
    levels: Vec<T>,
    outputs: Vec<Vec<T>>,
}

impl<T: Real> ThermalTable<T> {
    fn new(net: &QcaNetwork<T>, drive: &impl Drive<T>) -> Result<Self> {
        let n = net.n_cells();
        let outs = net.outputs();
        if n > MAX_DENSE_CELLS {
            // classical Boltzmann sum over H_P alone
            let energies = net.classical_energies(MAX_ENUMERATION_CELLS)?;
            let (_, b) = drive.coefficients(T::one());
            return Ok(Self {
                levels: energies.iter().map(|&e| e * b).collect(),
                outputs: (0..energies.len()).map(|c| outs.iter().map(|&o| T::of(spin(c, o) as f64)).collect()).collect(),
            });
        }
        let (a, b) = drive.coefficients(T::one());
        let fam = IsingFamily::new(net, MAX_DENSE_CELLS)?;
        let d = fam.dim();
        let eig = symmetric_eigen(&fam.dense(a, b), d)?;
        let outputs = (0..d)
            .map(|m| {
                let v = eig.vectors.column(m);
                outs.iter()
                    .map(|&o| v.iter().enumerate().fold(T::zero(), |acc, (c, &x)| acc + x * x * T::of(spin(c, o) as f64)))
                    .collect()
            })
            .collect();
        Ok(Self { levels: eig.values.clone(), outputs })
    }

    fn q_l(&self, beta: T) -> T {
        let e0 = self.levels.iter().fold(T::of(f64::INFINITY), |a, &e| a.min(e));
        let k = self.outputs.first().map_or(0, Vec::len);
        let mut z = vec![T::zero(); k];
        let mut part = T::zero();
        for (e, zs) in self.levels.iter().zip(&self.outputs) {
            let w = (-beta * (*e - e0)).exp();
            part += w;
            for (acc, &x) in z.iter_mut().zip(zs) {
                *acc += w * x;
            }
        }
        z.iter().fold(T::one(), |q, &x| q * (T::one() + (x / part).abs()) * T::of(0.5))
    }
}

/// Π over outputs of (1 + |⟨σ_z⟩|)/2 in the Boltzmann state of H(1): the
/// infinite-relaxation-rate limit of logical performance.
pub fn relaxed_ql<T: Real>(net: &QcaNetwork<T>, drive: &impl Drive<T>, beta: T) -> Result<T> {
    Ok(ThermalTable::new(net, drive)?.q_l(beta))
}

/// First β in [lo, hi] at which `f(β)` reaches `target`: a geometric scan
/// (ratio 1.05) brackets the crossing, bisection refines it to `rtol`.
pub fn threshold_crossing<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    lo: T,
    hi: T,
    target: T,
    rtol: T,
) -> Result<Option<T>> {
    if !(lo > T::zero() && hi > lo) {
        return Err(Error::InvalidParameter("crossing search needs 0 < lo < hi".into()));
    }
    if f(lo)? >= target {
        return Ok(Some(lo));
    }
    let ratio = T::of(1.05);
    let mut a = lo;
    loop {
        let b = (a * ratio).min(hi);
        if f(b)? >= target {
            let (mut x, mut y) = (a, b);
            while y - x > rtol * y {
                let mid = (x + y) * T::of(0.5);
                if f(mid)? >= target {
                    y = mid;
                } else {
                    x = mid;
                }
            }
            return Ok(Some((x + y) * T::of(0.5)));
        }
        if b >= hi {
            return Ok(None);
        }
        a = b;
    }
}

/// β at which [`relaxed_ql`] first reaches `target`.
pub fn relaxed_crossing<T: Real>(net: &QcaNetwork<T>, drive: &impl Drive<T>, target: T) -> Result<Option<T>> {
    let table = ThermalTable::new(net, drive)?;
    threshold_crossing(|b| Ok(table.q_l(b)), T::of(0.1), T::of(1e3), target, T::of(1e-8))
}

/// β at which the mean-field fixed point first reaches `target`.
pub fn mean_field_crossing<T: Real>(net: &QcaNetwork<T>, drive: &impl Drive<T>, target: T) -> Result<Option<T>> {
    threshold_crossing(|b| Ok(mean_field_fixed_point(net, b, drive)?.q_l), T::of(0.1), T::of(1e3), target, T::of(1e-6))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_device, classical_ground};
    use crate::schedule::{ScheduleKind, ScheduleSpec};

    fn census(name: &str) -> ExcitedCensus<f64> {
        let net = build_device(&name.parse().unwrap()).unwrap();
        incorrect_excited_census(&net, &classical_ground(&net).unwrap()).unwrap()
    }

    #[test]
    fn census_of_library_devices() {
        let c = census("wire-5");
        assert!((c.delta1 - 1.0).abs() < 1e-12 && c.d1 == 5, "{c:?}");
        let c = census("maj-111");
        assert!((c.delta1 - 0.554).abs() < 2e-3 && c.d1 == 1, "{c:?}");
        let c = census("maj-110");
        assert!((c.delta1 - 1.0).abs() < 2e-3 && c.d1 == 5, "{c:?}");
    }

    #[test]
    fn beta_star_estimates() {
        assert!((beta_star(0.554, 2, 0.99f64) - 9.6).abs() < 0.05);
        assert!((beta_star(1.0, 5, 0.99f64) - 6.2).abs() < 0.05);
        assert!((beta_star(0.416, 1, 0.99f64) - 11.1).abs() < 0.05);
    }

    #[test]
    fn relaxed_limit() {
        let net: QcaNetwork<f64> = build_device(&"wire-5".parse().unwrap()).unwrap();
        let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).unsmoothed::<f64>().unwrap();
        assert!(relaxed_ql(&net, &sched, 1e4).unwrap() > 0.999);
        assert!(relaxed_ql(&net, &sched, 1e-3).unwrap() < 0.6);
        let b = relaxed_crossing(&net, &sched, 0.99).unwrap().unwrap();
        assert!((b - 6.3).abs() < 0.2, "{b}");
    }

    #[test]
    fn crossing_scan() {
        let x = threshold_crossing(|b: f64| Ok(1.0 - (-b).exp()), 0.1, 100.0, 0.99, 1e-10).unwrap().unwrap();
        assert!((x - 100f64.ln()).abs() < 1e-8);
        assert!(threshold_crossing(|_: f64| Ok(0.5), 0.1, 10.0, 0.99, 1e-6).unwrap().is_none());
    }
}
