//! Exact density-operator dynamics with relaxation toward a steady state.

mod density;
mod evolve;
mod initial;
mod metrics;
mod steady;

pub use density::DensityState;
pub use evolve::{evolve, initial_state, EvolveOptions, LvnModel, MetricsTrace, Trajectory, MAX_EVOLVE_CELLS};
pub use initial::{InitialState, NEWTON_MAX_ITERATIONS};
pub use metrics::{factorized_classical, logical_performance, metrics, Metrics};
pub use steady::{boltzmann_matrix, parse_args, steady_state, DissipationSpec, Relaxation};

pub(crate) use density::cell_expectations_mixed;
pub(crate) use steady::steady_matrix;
