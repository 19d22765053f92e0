use nalgebra::DMatrix;

use super::{Eigensystem, HermitianOperator};
use crate::network::ClassicalGround;
use crate::scalar::Real;

/// Orthogonal projector kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub enum Projector<T> {
    /// Span of orthonormal columns.
    Span(DMatrix<T>),
    /// Span of computational basis states.
    Basis { dim: usize, states: Vec<usize> },
}

impl<T: Real> Projector<T> {
    pub fn rank(&self) -> usize {
        match self {
            Projector::Span(v) => v.ncols(),
            Projector::Basis { states, .. } => states.len(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Projector::Span(v) => v.nrows(),
            Projector::Basis { dim, .. } => *dim,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<T> {
        match self {
            Projector::Span(v) => v * v.transpose(),
            Projector::Basis { dim, states } => {
                let mut p = DMatrix::zeros(*dim, *dim);
                for &s in states {
                    p[(s, s)] = T::one();
                }
                p
            }
        }
    }

    pub fn to_operator(&self) -> HermitianOperator<T> {
        HermitianOperator::real(self.to_matrix())
    }

    /// tr(ρP) given the real part of ρ (P is real, so Im ρ drops out).
    pub fn expectation(&self, rho_re: &DMatrix<T>) -> T {
        match self {
            Projector::Span(v) => {
                let mut acc = T::zero();
                for k in 0..v.ncols() {
                    let c = v.column(k);
                    acc += c.dot(&(rho_re * c));
                }
                acc
            }
            Projector::Basis { states, .. } => states.iter().map(|&s| rho_re[(s, s)]).fold(T::zero(), |a, b| a + b),
        }
    }

    /// ⟨ψ|P|ψ⟩ for ψ = u + iv.
    pub fn expectation_pure(&self, u: &[T], v: &[T]) -> T {
        match self {
            Projector::Span(w) => {
                let mut acc = T::zero();
                for k in 0..w.ncols() {
                    let c = w.column(k);
                    let (mut pu, mut pv) = (T::zero(), T::zero());
                    for r in 0..c.len() {
                        pu += c[r] * u[r];
                        pv += c[r] * v[r];
                    }
                    acc += pu * pu + pv * pv;
                }
                acc
            }
            Projector::Basis { states, .. } => {
                states.iter().map(|&s| u[s] * u[s] + v[s] * v[s]).fold(T::zero(), |a, b| a + b)
            }
        }
    }
}

/// Projector onto the (tolerance-degenerate) lowest level.
pub fn ground_projector<T: Real>(eig: &Eigensystem<T>) -> Projector<T> {
    let g = eig.ground_degeneracy();
    Projector::Span(eig.vectors.columns(0, g).into_owned())
}

pub fn classical_projector<T: Real>(ground: &ClassicalGround<T>) -> Projector<T> {
    Projector::Basis { dim: 1 << ground.polarizations.len(), states: ground.configurations.clone() }
}

/// Rank-1 projector onto the uniform superposition (ground state of −Σσ_x).
pub fn transverse_projector<T: Real>(n_cells: usize) -> Projector<T> {
    let d = 1usize << n_cells;
    Projector::Span(DMatrix::from_element(d, 1, T::one() / T::of(d as f64).sqrt()))
}

pub enum Which<'a, T> {
    Ground,
    Classical(&'a ClassicalGround<T>),
    Transverse,
}

pub fn projector<T: Real>(eig: &Eigensystem<T>, which: Which<'_, T>) -> HermitianOperator<T> {
    match which {
        Which::Ground => ground_projector(eig),
        Which::Classical(g) => classical_projector(g),
        Which::Transverse => transverse_projector(eig.dim().trailing_zeros() as usize),
    }
    .to_operator()
}
