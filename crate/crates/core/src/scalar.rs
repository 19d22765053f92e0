//! Scalar abstraction shared by the numerical core.

use nalgebra as na;
use num_traits as nt;

/// Floating point types the simulator can run on (`f32` or `f64`).
pub trait Real:
    na::RealField + Copy + nt::FloatConst + nt::ToPrimitive + nt::FromPrimitive + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        na::convert(x)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used where an `f64` computation would use `tol`: never
    /// tighter than a few hundred ulps of the working precision.
    #[inline]
    fn tol(tol: f64) -> Self {
        let eps = Self::default_epsilon().as_f64();
        Self::of(tol.max(256.0 * eps))
    }
}

impl Real for f32 {}
impl Real for f64 {}
