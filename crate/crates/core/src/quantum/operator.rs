//! Transverse-field Ising Hamiltonians in the computational basis.

use nalgebra::DMatrix;

use crate::network::QcaNetwork;
use crate::scalar::Real;
use crate::{Error, Result};

/// Largest network for which dense operators are built.
pub const MAX_DENSE_CELLS: usize = 12;

/// Dense Hermitian operator stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T> {
    re: DMatrix<T>,
    im: DMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn real(re: DMatrix<T>) -> Self {
        let d = re.nrows();
        Self { re, im: DMatrix::zeros(d, d) }
    }

    pub fn complex(re: DMatrix<T>, im: DMatrix<T>) -> Self {
        Self { re, im }
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn re(&self) -> &DMatrix<T> {
        &self.re
    }

    pub fn im(&self) -> &DMatrix<T> {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|x| *x == T::zero())
    }

    pub fn trace(&self) -> T {
        self.re.trace()
    }

    pub fn frobenius_norm(&self) -> T {
        (self.re.norm_squared() + self.im.norm_squared()).sqrt()
    }

    /// ‖O − O†‖_F / ‖O‖_F.
    pub fn hermiticity_error(&self) -> T {
        let d = (&self.re - self.re.transpose()).norm_squared() + (&self.im + self.im.transpose()).norm_squared();
        let n = self.frobenius_norm();
        if n == T::zero() {
            T::zero()
        } else {
            d.sqrt() / n
        }
    }

    pub fn mul(&self, other: &Self) -> (DMatrix<T>, DMatrix<T>) {
        (&self.re * &other.re - &self.im * &other.im, &self.re * &other.im + &self.im * &other.re)
    }
}

/// The Hamiltonian family H̃(A, B) = −(A/2)Σσ_x + B·H_P/2 of one network,
/// with the diagonal problem part precomputed.
#[derive(Debug, Clone)]
pub struct IsingFamily<T> {
    n: usize,
    problem: Vec<T>,
}

impl<T: Real> IsingFamily<T> {
    pub fn new(net: &QcaNetwork<T>, max_cells: usize) -> Result<Self> {
        Ok(Self { n: net.n_cells(), problem: net.classical_energies(max_cells)? })
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.problem.len()
    }

    /// ½[Σhσ − ΣEσσ] per basis state.
    pub fn problem(&self) -> &[T] {
        &self.problem
    }

    pub fn dense(&self, a: T, b: T) -> DMatrix<T> {
        let d = self.dim();
        let t = a * T::of(0.5);
        let mut h = DMatrix::zeros(d, d);
        for c in 0..d {
            h[(c, c)] = b * self.problem[c];
            for i in 0..self.n {
                h[(c ^ (1 << i), c)] = -t;
            }
        }
        h
    }

    /// out = H x for a real vector.
    pub fn apply(&self, a: T, b: T, x: &[T], out: &mut [T]) {
        let t = a * T::of(0.5);
        for c in 0..self.dim() {
            let mut acc = b * self.problem[c] * x[c];
            for i in 0..self.n {
                acc -= t * x[c ^ (1 << i)];
            }
            out[c] = acc;
        }
    }

    /// out = [H, M] for a real d×d matrix stored column-major.
    pub fn commutator(&self, a: T, b: T, m: &[T], out: &mut [T]) {
        let d = self.dim();
        let t = a * T::of(0.5);
        for col in 0..d {
            let dc = b * self.problem[col];
            let base = col * d;
            for row in 0..d {
                let mut acc = (b * self.problem[row] - dc) * m[base + row];
                for i in 0..self.n {
                    let flip = 1 << i;
                    acc -= t * (m[base + (row ^ flip)] - m[(col ^ flip) * d + row]);
                }
                out[base + row] = acc;
            }
        }
    }
}

/// Dense H̃ for a network (N ≤ 12).
pub fn build_hamiltonian<T: Real>(net: &QcaNetwork<T>, a: T, b: T) -> Result<HermitianOperator<T>> {
    if net.n_cells() > MAX_DENSE_CELLS {
        return Err(Error::TooLarge { n: net.n_cells(), max: MAX_DENSE_CELLS });
    }
    Ok(HermitianOperator::real(IsingFamily::new(net, MAX_DENSE_CELLS)?.dense(a, b)))
}
