use serde::Serialize;

use crate::network::{effective_bias, ClassicalGround, QcaNetwork};
use crate::scalar::Real;
use crate::{Error, Result};

/// Second-order overlap coefficients of the initial and final ground states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityParams<T> {
    /// (1/4)Σ h_i² + (1/16)Σ_{i<j} E_ij².
    pub f0: T,
    /// (1/4)Σ 1/h̃_i² on the classical ground.
    pub f1: T,
}

impl<T: Real> QualityParams<T> {
    /// Overlap of the s = 0 ground state with the transverse state.
    pub fn q0(&self, alpha0: T) -> T {
        T::one() - self.f0 / (alpha0 * alpha0)
    }

    /// Overlap of the s = 1 ground state with the classical ground.
    pub fn q1(&self, alpha1: T) -> T {
        T::one() - self.f1 * alpha1 * alpha1
    }
}

pub fn quality_params<T: Real>(net: &QcaNetwork<T>, ground: &ClassicalGround<T>) -> Result<QualityParams<T>> {
    let quarter = T::of(0.25);
    let h = effective_bias(net, ground)?;
    if let Some(i) = h.iter().position(|x| *x == T::zero()) {
        return Err(Error::InvalidParameter(format!("cell {i} has zero effective bias")));
    }
    let f0 = quarter * net.bias().iter().fold(T::zero(), |a, &b| a + b * b)
        + T::of(1.0 / 16.0) * net.pairs().iter().fold(T::zero(), |a, &(_, _, e)| a + e * e);
    let f1 = quarter * h.iter().fold(T::zero(), |a, &x| a + T::one() / (x * x));
    Ok(QualityParams { f0, f1 })
}

/// Largest α1 with Q1 ≥ target.
pub fn alpha1_bound<T: Real>(f1: T, target: T) -> T {
    ((T::one() - target) / f1).sqrt()
}
