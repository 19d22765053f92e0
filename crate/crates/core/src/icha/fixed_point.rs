use super::rhs::{gamma_vectors, mean_field_eta};
use crate::network::{classical_ground, spin, QcaNetwork};
use crate::quantum::{symmetric_eigen, IsingFamily, MAX_DENSE_CELLS};
use crate::schedule::Drive;
use crate::scalar::Real;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;

/// Self-consistent mean-field target at the end of the clock.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint<T> {
    /// η_z per cell.
    pub eta_z: Vec<T>,
    /// Π over outputs of (1 + |η_z|)/2.
    pub q_l: T,
    pub iterations: usize,
    pub residual: T,
    pub damped: bool,
}

fn ground_polarizations<T: Real>(net: &QcaNetwork<T>, a: T, b: T) -> Result<Vec<T>> {
    let n = net.n_cells();
    if n > MAX_DENSE_CELLS {
        let g = classical_ground(net)?;
        return Ok((0..n).map(|i| g.polarization(i)).collect());
    }
    let fam = IsingFamily::new(net, MAX_DENSE_CELLS)?;
    let eig = symmetric_eigen(&fam.dense(a, b), 1)?;
    let psi = eig.vectors.column(0);
    Ok((0..n)
        .map(|i| psi.iter().enumerate().map(|(c, &p)| p * p * T::of(spin(c, i) as f64)).fold(T::zero(), |x, y| x + y))
        .collect())
}

/// Iterates η ← η(Γ(η)) at s = 1, starting from the ground-state
/// polarizations of H(1); switches to 0.5 damping once the update stops
/// shrinking.
pub fn mean_field_fixed_point<T: Real>(net: &QcaNetwork<T>, beta: T, drive: &impl Drive<T>) -> Result<FixedPoint<T>> {
    if !(beta > T::zero()) {
        return Err(Error::InvalidParameter("inverse temperature must be positive".into()));
    }
    let (a, b) = drive.coefficients(T::one());
    let n = net.n_cells();
    let mut z = ground_polarizations(net, a, b)?;
    let mut lam = vec![[T::zero(); 3]; n];
    let mut damped = false;
    let mut last = T::of(f64::INFINITY);
    let tol = T::tol(1e-12);
    let mut residual = T::of(f64::INFINITY);
    for it in 1..=MAX_ITERATIONS {
        for (l, &zi) in lam.iter_mut().zip(&z) {
            l[2] = zi;
        }
        let eta = mean_field_eta(&gamma_vectors(net, &lam, a, b), beta);
        residual = eta.iter().zip(&z).fold(T::zero(), |m, (e, &zi)| m.max((e[2] - zi).abs()));
        if residual <= tol {
            let z: Vec<T> = eta.iter().map(|e| e[2]).collect();
            let q_l = net
                .outputs()
                .iter()
                .map(|&o| (T::one() + z[o].abs()) * T::of(0.5))
                .fold(T::one(), |x, y| x * y);
            return Ok(FixedPoint { eta_z: z, q_l, iterations: it, residual, damped });
        }
        if residual >= last {
            damped = true;
        }
        last = residual;
        let w = if damped { T::of(0.5) } else { T::one() };
        for (zi, e) in z.iter_mut().zip(&eta) {
            *zi += w * (e[2] - *zi);
        }
    }
    Err(Error::Convergence { what: "mean-field fixed point", residual: residual.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_device;
    use crate::schedule::{ScheduleKind, ScheduleSpec};

    #[test]
    fn cold_limit_is_classical() {
        let net: QcaNetwork<f64> = build_device(&"wire-3".parse().unwrap()).unwrap();
        let sched = ScheduleSpec::new(ScheduleKind::Linear).unsmoothed::<f64>().unwrap();
        let fp = mean_field_fixed_point(&net, 1e4, &sched).unwrap();
        let g = classical_ground(&net).unwrap();
        for (i, z) in fp.eta_z.iter().enumerate() {
            // |η| = 1 along Γ̂, which tilts by α1 off the z axis
            assert!((z * g.polarization(i) - 1.0).abs() < 5e-3, "{z}");
        }
        assert!(fp.q_l > 0.99);
    }

    #[test]
    fn hot_limit_is_unpolarized() {
        let net: QcaNetwork<f64> = build_device(&"wire-3".parse().unwrap()).unwrap();
        let sched = ScheduleSpec::new(ScheduleKind::Linear).unsmoothed::<f64>().unwrap();
        let fp = mean_field_fixed_point(&net, 0.05, &sched).unwrap();
        assert!(fp.eta_z.iter().all(|z| z.abs() < 0.1));
    }
}
