//! Levenberg–Marquardt least squares with covariance estimates.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative step size at which iteration stops.
    pub xtol: f64,
    /// Relative cost reduction at which iteration stops.
    pub ftol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iterations: 200, xtol: 1e-14, ftol: 1e-15 }
    }
}

#[derive(Debug, Clone)]
pub struct LmFit<T> {
    pub params: Vec<T>,
    /// s²(JᵀJ)⁻¹ with s² the residual variance per degree of freedom.
    pub covariance: DMatrix<T>,
    /// Sum of squared residuals.
    pub cost: T,
    pub iterations: usize,
}

impl<T: Real> LmFit<T> {
    pub fn std_error(&self, k: usize) -> T {
        self.covariance[(k, k)].max(T::zero()).sqrt()
    }
}

/// Minimizes Σ r_i(p)²; `model(p, r, J)` fills residuals and their Jacobian.
pub fn levenberg_marquardt<T, F>(mut model: F, p0: &[T], n_residuals: usize, opts: LmOptions) -> Result<LmFit<T>>
where
    T: Real,
    F: FnMut(&[T], &mut DVector<T>, &mut DMatrix<T>),
{
    let np = p0.len();
    if n_residuals < np {
        return Err(Error::InvalidParameter("fewer residuals than parameters".into()));
    }
    let mut p = DVector::from_column_slice(p0);
    let mut r = DVector::zeros(n_residuals);
    let mut j = DMatrix::zeros(n_residuals, np);
    model(p.as_slice(), &mut r, &mut j);
    let mut cost = r.norm_squared();
    let mut lambda = T::of(1e-3);
    let (mut rt, mut jt) = (r.clone(), j.clone());
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * jtj[(k, k)].max(T::of(1e-30));
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= T::of(10.0);
                continue;
            };
            let trial = &p + &step;
            model(trial.as_slice(), &mut rt, &mut jt);
            let c = rt.norm_squared();
            if c.is_finite() && c <= cost {
                let small_step = step.norm() <= T::of(opts.xtol) * (p.norm() + T::of(opts.xtol));
                let small_gain = cost - c <= T::of(opts.ftol) * cost;
                p = trial;
                std::mem::swap(&mut r, &mut rt);
                std::mem::swap(&mut j, &mut jt);
                cost = c;
                lambda = (lambda / T::of(10.0)).max(T::of(1e-12));
                improved = true;
                converged = small_step || small_gain || cost == T::zero();
                break;
            }
            lambda *= T::of(10.0);
        }
        if !improved {
            // no downhill step at any damping: already at the minimum
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence { what: "Levenberg-Marquardt fit", residual: cost.as_f64() });
    }
    let dof = (n_residuals - np).max(1);
    let s2 = cost / T::of(dof as f64);
    let jtj = j.transpose() * &j;
    let covariance = jtj
        .try_inverse()
        .ok_or(Error::Convergence { what: "fit covariance (singular Jacobian)", residual: cost.as_f64() })?
        * s2;
    Ok(LmFit { params: p.as_slice().to_vec(), covariance, cost, iterations })
}
