//! First-order coherence-vector (ICHA) dynamics: one Bloch vector per cell,
//! coupled through the mean polarizations of the neighbours.

mod evolve;
mod fixed_point;
mod oscillation;
mod rhs;

pub use evolve::{evolve_icha, IchaInitial, IchaModel, IchaOptions, IchaTrajectory};
pub use fixed_point::{mean_field_fixed_point, FixedPoint};
pub use oscillation::dominant_frequency;
pub use rhs::{
    gamma_vectors, icha_rhs, mean_field_eta, spectral_eta, CoherenceState, DissipationVectorSpec, EtaKind,
};
