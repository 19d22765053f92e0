//! Adiabatic clocking of two-state QCA networks.
//!
//! The numerical core is generic over the scalar type ([`Real`], `f32` or
//! `f64`); the aliases below fix it to `f64`, which is what the sweep harness
//! and the command-line tool use.

mod error;
pub mod analysis;
pub mod fit;
pub mod icha;
pub mod lvn;
pub mod network;
pub mod ode;
pub mod quantum;
pub mod scalar;
pub mod schedule;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type QcaNetwork = network::QcaNetwork<f64>;
pub type ClassicalGround = network::ClassicalGround<f64>;
pub type Schedule = schedule::Schedule<f64>;
pub type HermitianOperator = quantum::HermitianOperator<f64>;
pub type Eigensystem = quantum::Eigensystem<f64>;
pub type SpectrumSlice = quantum::SpectrumSlice<f64>;
pub type GapFit = quantum::GapFit<f64>;
pub type DensityState = lvn::DensityState<f64>;
pub type Trajectory = lvn::Trajectory<f64>;
pub type CoherenceState = icha::CoherenceState<f64>;
pub type IchaTrajectory = icha::IchaTrajectory<f64>;
pub type QualityParams = analysis::QualityParams<f64>;
pub type WireLzParams = analysis::WireLzParams<f64>;
