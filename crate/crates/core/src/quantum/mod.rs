//! Dense Hamiltonians, eigensystems, projectors and spectrum sweeps.

mod eigen;
mod gapfit;
mod operator;
mod projector;
mod spectrum;

pub use eigen::{eigensystem, symmetric_eigen, Eigensystem};
pub use gapfit::{fit_hyperbola, fit_min_gap, hyperbola, GapFit, DEFAULT_FIT_WINDOW};
pub use operator::{build_hamiltonian, HermitianOperator, IsingFamily, MAX_DENSE_CELLS};
pub use projector::{classical_projector, ground_projector, projector, transverse_projector, Projector, Which};
pub use spectrum::{spectrum_slice, spectrum_sweep, SpectrumSlice, SpectrumSweep};
