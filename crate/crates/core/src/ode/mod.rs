//! Time integrators: adaptive Dormand–Prince 5(4) and fixed-step implicit Euler.

mod bdf;
mod dopri;

pub use bdf::{integrate_bdf1, Bdf1Options, Bdf1Stats, ImplicitSystem};
pub use dopri::{integrate_dopri5, DenseStep, DopriOptions, DopriStats, OdeSystem};
