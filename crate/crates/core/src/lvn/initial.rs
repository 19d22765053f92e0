use nalgebra::DMatrix;

use super::steady::{steady_matrix, DissipationSpec};
use super::DensityState;
use crate::network::ClassicalGround;
use crate::quantum::{ground_projector, symmetric_eigen, IsingFamily};
use crate::schedule::Drive;
use crate::scalar::Real;
use crate::Result;

pub const NEWTON_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone)]
pub struct InitialState<T> {
    pub state: DensityState<T>,
    /// Frobenius norm of the dimensionless right-hand side at the root.
    pub residual: T,
    pub iterations: usize,
    /// Newton failed and the ground projector was used instead.
    pub fallback: bool,
    /// Rank of the ground projector of H̃(0).
    pub ground_rank: usize,
}

/// ‖−i[H, ρ] − δ(ρ − ρ_ss)‖_F.
pub(crate) fn rhs_residual<T: Real>(
    fam: &IsingFamily<T>,
    a: T,
    b: T,
    rate: T,
    rho: &DensityState<T>,
    ss: Option<&DMatrix<T>>,
) -> T {
    let d = fam.dim();
    let mut cr = vec![T::zero(); d * d];
    let mut ci = vec![T::zero(); d * d];
    fam.commutator(a, b, rho.im.as_slice(), &mut cr);
    fam.commutator(a, b, rho.re.as_slice(), &mut ci);
    let mut acc = T::zero();
    for k in 0..d * d {
        let target = ss.map_or(T::zero(), |m| m.as_slice()[k]);
        let fr = cr[k] - rate * (rho.re.as_slice()[k] - target);
        let fi = -ci[k] - rate * rho.im.as_slice()[k];
        acc += fr * fr + fi * fi;
    }
    acc.sqrt()
}

/// Root of the relaxation equation near the ground projector of H̃(0).
///
/// The right-hand side is linear in ρ and diagonal in the eigenbasis of
/// H̃(0) (each element decays as −(iω_ab + δ)), so Newton's iteration is
/// carried out there; it converges in one step up to rounding.
pub(crate) fn initial_state_with<T: Real>(
    fam: &IsingFamily<T>,
    ground: &ClassicalGround<T>,
    sched: &impl Drive<T>,
    spec: &DissipationSpec<T>,
) -> Result<InitialState<T>> {
    let (a, b) = sched.coefficients(T::zero());
    let eig = symmetric_eigen(&fam.dense(a, b), fam.dim())?;
    let proj = ground_projector(&eig);
    let ground_rank = proj.rank();
    let start = DensityState::from_projector(&proj, T::zero());
    if spec.is_coherent() {
        let residual = rhs_residual(fam, a, b, T::zero(), &start, None);
        return Ok(InitialState { state: start, residual, iterations: 0, fallback: false, ground_rank });
    }
    let delta = spec.rate;
    let ss = steady_matrix(fam, ground, a, b, spec.kind)?;
    let tol = T::tol(1e-10);
    let v = &eig.vectors;
    let vt = v.transpose();
    let mut rho = start.clone();
    let mut residual = rhs_residual(fam, a, b, delta, &rho, Some(&ss));
    let mut iterations = 0;
    let sigma = &vt * &ss * v;
    while residual > tol && iterations < NEWTON_MAX_ITERATIONS {
        iterations += 1;
        let r = &vt * &rho.re * v;
        let i = &vt * &rho.im * v;
        let d = fam.dim();
        let mut nr = DMatrix::zeros(d, d);
        let mut ni = DMatrix::zeros(d, d);
        for col in 0..d {
            for row in 0..d {
                let w = eig.values[row] - eig.values[col];
                // F̃ = −iωρ̃ − δ(ρ̃ − σ̃)
                let fr = w * i[(row, col)] - delta * (r[(row, col)] - sigma[(row, col)]);
                let fi = -w * r[(row, col)] - delta * i[(row, col)];
                // ρ̃ ← ρ̃ + F̃ / (δ + iω)
                let den = delta * delta + w * w;
                nr[(row, col)] = r[(row, col)] + (fr * delta + fi * w) / den;
                ni[(row, col)] = i[(row, col)] + (fi * delta - fr * w) / den;
            }
        }
        rho.re = v * nr * &vt;
        rho.im = v * ni * &vt;
        rho.hermitize();
        let next = rhs_residual(fam, a, b, delta, &rho, Some(&ss));
        if !next.is_finite() {
            break;
        }
        residual = next;
    }
    if residual > tol {
        let residual = rhs_residual(fam, a, b, delta, &start, Some(&ss));
        return Ok(InitialState { state: start, residual, iterations, fallback: true, ground_rank });
    }
    Ok(InitialState { state: rho, residual, iterations, fallback: false, ground_rank })
}
