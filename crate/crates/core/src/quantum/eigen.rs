use nalgebra::{DMatrix, SymmetricEigen};

use super::HermitianOperator;
use crate::scalar::Real;
use crate::{Error, Result};

/// Lowest `m` eigenpairs of a real symmetric operator, ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem<T> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns (dim × m).
    pub vectors: DMatrix<T>,
    /// Highest minus lowest eigenvalue of the full spectrum.
    pub spectral_range: T,
    /// max_k ‖H v_k − λ_k v_k‖.
    pub residual: T,
}

impl<T: Real> Eigensystem<T> {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Tolerance below which levels count as degenerate.
    pub fn degeneracy_tolerance(&self) -> T {
        T::tol(1e-9) * self.spectral_range.max(T::default_epsilon())
    }

    /// Number of computed levels degenerate with the lowest one.
    pub fn ground_degeneracy(&self) -> usize {
        let tol = self.degeneracy_tolerance();
        self.values.iter().take_while(|&&e| e - self.values[0] <= tol).count()
    }

    pub fn gap(&self) -> Option<T> {
        (self.values.len() > 1).then(|| (self.values[1] - self.values[0]).max(T::zero()))
    }
}

/// Full dense decomposition of a real symmetric matrix, sorted and
/// residual-checked against 1e-10·‖H‖.
pub fn symmetric_eigen<T: Real>(h: &DMatrix<T>, m: usize) -> Result<Eigensystem<T>> {
    let d = h.nrows();
    if m == 0 || m > d {
        return Err(Error::InvalidParameter(format!("requested {m} levels of a {d}-dimensional operator")));
    }
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().take(m).map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(d, m, |r, c| eig.eigenvectors[(r, order[c])]);
    let spectral_range = eig.eigenvalues[order[d - 1]] - eig.eigenvalues[order[0]];
    let mut residual = T::zero();
    for (c, &lam) in values.iter().enumerate() {
        let v = vectors.column(c);
        residual = residual.max((h * v - v * lam).norm());
    }
    let bound = T::tol(1e-10) * h.norm().max(T::one());
    if !(residual <= bound) {
        return Err(Error::Convergence { what: "symmetric eigensolver", residual: residual.as_f64() });
    }
    Ok(Eigensystem { values, vectors, spectral_range, residual })
}

pub fn eigensystem<T: Real>(op: &HermitianOperator<T>, m: usize) -> Result<Eigensystem<T>> {
    if !op.is_real() {
        return Err(Error::InvalidParameter("eigensystem expects a real symmetric operator".into()));
    }
    symmetric_eigen(op.re(), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_two_level() {
        let h = DMatrix::<f64>::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]);
        let e = symmetric_eigen(&h, 2).unwrap();
        assert_eq!(e.values, vec![-0.5, 0.5]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert_eq!(e.ground_degeneracy(), 1);
        assert!(symmetric_eigen(&h, 3).is_err());
    }

    #[test]
    fn orthonormal_vectors() {
        let d = 16;
        let h = DMatrix::from_fn(d, d, |i, j| ((i + j) as f64).cos() + if i == j { i as f64 } else { 0.0 });
        let e = symmetric_eigen(&h, 5).unwrap();
        let g = e.vectors.transpose() * &e.vectors;
        assert!((g - DMatrix::identity(5, 5)).abs().max() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
