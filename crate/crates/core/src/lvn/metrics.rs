use super::DensityState;
use crate::network::{ClassicalGround, QcaNetwork};
use crate::quantum::{classical_projector, ground_projector, Eigensystem};
use crate::scalar::Real;

/// Adiabaticity, classical and logical performance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics<T> {
    pub q_a: T,
    pub q_cl: T,
    pub q_l: T,
}

/// Q_L = 2^{−|Ω|} Π_{i∈Ω} (1 + ⟨σ_z^i⟩ P_i).
pub fn logical_performance<T: Real>(z: &[T], outputs: &[usize], ground: &ClassicalGround<T>) -> T {
    outputs
        .iter()
        .map(|&i| (T::one() + z[i] * ground.polarization(i)) * T::of(0.5))
        .fold(T::one(), |a, b| a * b)
}

/// Product-state estimate Π_i (1 + ⟨σ_z^i⟩ P_i)/2 of the classical overlap.
pub fn factorized_classical<T: Real>(z: &[T], ground: &ClassicalGround<T>) -> T {
    (0..z.len()).map(|i| (T::one() + z[i] * ground.polarization(i)) * T::of(0.5)).fold(T::one(), |a, b| a * b)
}

/// Metrics of ρ against the instantaneous eigensystem and classical ground.
pub fn metrics<T: Real>(
    rho: &DensityState<T>,
    net: &QcaNetwork<T>,
    eig: &Eigensystem<T>,
    ground: &ClassicalGround<T>,
) -> Metrics<T> {
    let z: Vec<T> = rho.cell_expectations().iter().map(|e| e[2]).collect();
    Metrics {
        q_a: ground_projector(eig).expectation(&rho.re),
        q_cl: classical_projector(ground).expectation(&rho.re),
        q_l: logical_performance(&z, net.outputs(), ground),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_device, classical_ground};
    use crate::quantum::{build_hamiltonian, eigensystem};

    #[test]
    fn classical_state_scores_one() {
        let net: QcaNetwork<f64> = build_device(&"wire-3".parse().unwrap()).unwrap();
        let g = classical_ground(&net).unwrap();
        let rho = DensityState::from_projector(&classical_projector(&g), 1.0);
        let eig = eigensystem(&build_hamiltonian(&net, 0.0, 1.0).unwrap(), 8).unwrap();
        let m = metrics(&rho, &net, &eig, &g);
        assert!((m.q_cl - 1.0).abs() < 1e-15 && (m.q_l - 1.0).abs() < 1e-15 && (m.q_a - 1.0).abs() < 1e-12);
        let mixed = DensityState::maximally_mixed(8);
        let m = metrics(&mixed, &net, &eig, &g);
        assert!((m.q_cl - 0.125).abs() < 1e-15 && (m.q_l - 0.5).abs() < 1e-15);
    }
}
