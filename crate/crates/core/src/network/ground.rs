use nalgebra::DVector;

use super::{spin, QcaNetwork};
use crate::scalar::Real;
use crate::{Error, Result};

/// Largest network the brute-force enumeration accepts.
pub const MAX_ENUMERATION_CELLS: usize = 20;

/// Minimizer of the classical problem Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalGround<T> {
    /// ⟨σ_z^i⟩ of the (first) minimizing configuration.
    pub polarizations: Vec<i8>,
    pub energy: T,
    pub degenerate: bool,
    pub degeneracy_count: usize,
    /// Basis indices of every configuration within tolerance of the minimum.
    pub configurations: Vec<usize>,
}

impl<T: Real> ClassicalGround<T> {
    pub fn config(&self) -> usize {
        self.configurations[0]
    }

    pub fn polarization(&self, i: usize) -> T {
        T::of(self.polarizations[i] as f64)
    }
}

/// Exhaustive minimization over all 2^N configurations; ties are detected
/// with a tolerance of 1e-9 relative to the classical energy range.
pub fn classical_ground<T: Real>(net: &QcaNetwork<T>) -> Result<ClassicalGround<T>> {
    let energies = net.classical_energies(MAX_ENUMERATION_CELLS)?;
    Ok(ground_from_energies(net.n_cells(), &energies))
}

pub(crate) fn ground_from_energies<T: Real>(n: usize, energies: &[T]) -> ClassicalGround<T> {
    let (mut lo, mut hi) = (energies[0], energies[0]);
    for &e in energies {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    let tol = T::tol(1e-9) * (hi - lo).max(T::one());
    let configurations: Vec<usize> =
        (0..energies.len()).filter(|&c| energies[c] - lo <= tol).collect();
    let first = configurations[0];
    ClassicalGround {
        polarizations: (0..n).map(|i| spin(first, i)).collect(),
        energy: lo,
        degenerate: configurations.len() > 1,
        degeneracy_count: configurations.len(),
        configurations,
    }
}

/// h̃_i = h_i − Σ_j E_ij P_j evaluated on the ground-state polarizations.
pub fn effective_bias<T: Real>(net: &QcaNetwork<T>, ground: &ClassicalGround<T>) -> Result<DVector<T>> {
    if ground.degenerate {
        return Err(Error::DegenerateGround { count: ground.degeneracy_count });
    }
    let p = DVector::from_iterator(net.n_cells(), (0..net.n_cells()).map(|i| ground.polarization(i)));
    Ok(net.bias() - net.kink() * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dev(name: &str) -> QcaNetwork<f64> {
        super::super::build_device(&name.parse().unwrap()).unwrap()
    }

    #[test]
    fn wire_ground_is_aligned_with_driver() {
        let net = dev("wire-3");
        let g = classical_ground(&net).unwrap();
        assert!(!g.degenerate);
        // Literal sign convention: h > 0 favours σ = −1 in every cell.
        assert!(g.polarizations.iter().all(|&p| p == g.polarizations[0]));
    }

    #[test]
    fn unbiased_pair_is_degenerate() {
        let mut k = DMatrix::zeros(2, 2);
        k[(0, 1)] = 1.0;
        k[(1, 0)] = 1.0;
        let net = QcaNetwork::from_parts(k, DVector::zeros(2), vec![1]).unwrap();
        let g = classical_ground(&net).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.degeneracy_count, 2);
        assert!(effective_bias(&net, &g).is_err());
    }

    #[test]
    fn wire_effective_bias() {
        let net = dev("wire-5");
        let g = classical_ground(&net).unwrap();
        let h = effective_bias(&net, &g).unwrap();
        let mag: Vec<f64> = h.iter().map(|x| x.abs()).collect();
        for (m, e) in mag.iter().zip([2.0, 2.0, 2.0, 2.0, 1.0]) {
            assert!((m - e).abs() < 1e-12);
        }
        let one = dev("wire-1");
        let h1 = effective_bias(&one, &classical_ground(&one).unwrap()).unwrap();
        assert!((h1[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn majority_center_bias() {
        let net = dev("maj-111");
        let h = effective_bias(&net, &classical_ground(&net).unwrap()).unwrap();
        assert!((h[3].abs() - 4.0).abs() < 1e-12);
    }
}
