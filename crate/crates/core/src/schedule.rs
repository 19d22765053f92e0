//! Clocking schedules (A(s), B(s)) and the initial-oscillation smoothing map.

use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Linear,
    #[serde(alias = "quasi", alias = "quasi-linear")]
    QuasiLinear,
    #[serde(alias = "sinus")]
    Sinusoidal,
}

impl ScheduleKind {
    pub const ALL: [ScheduleKind; 3] = [ScheduleKind::Linear, ScheduleKind::QuasiLinear, ScheduleKind::Sinusoidal];

    pub fn short_name(self) -> &'static str {
        match self {
            ScheduleKind::Linear => "linear",
            ScheduleKind::QuasiLinear => "quasi",
            ScheduleKind::Sinusoidal => "sinus",
        }
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "l" => Ok(ScheduleKind::Linear),
            "quasi" | "quasilinear" | "quasi-linear" | "q" => Ok(ScheduleKind::QuasiLinear),
            "sinus" | "sinusoidal" | "s" => Ok(ScheduleKind::Sinusoidal),
            _ => Err(Error::InvalidParameter(format!("unknown schedule `{s}`"))),
        }
    }
}

impl std::fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

/// A clocking protocol with ratio α(s) = A/B running from α0 down to α1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule<T> {
    kind: ScheduleKind,
    alpha0: T,
    alpha1: T,
    sigma: T,
}

impl<T: Real> Schedule<T> {
    pub fn new(kind: ScheduleKind, alpha0: T, alpha1: T) -> Result<Self> {
        if !(alpha0 > T::one()) {
            return Err(Error::InvalidParameter(format!("alpha0 = {} must exceed 1", alpha0.as_f64())));
        }
        if !(alpha1 > T::zero() && alpha1 < T::one()) {
            return Err(Error::InvalidParameter(format!("alpha1 = {} must lie in (0, 1)", alpha1.as_f64())));
        }
        Ok(Self { kind, alpha0, alpha1, sigma: T::zero() })
    }

    /// Enables the smoothing map with width σ (0 disables it).
    pub fn with_smoothing(mut self, sigma: T) -> Result<Self> {
        if !(sigma >= T::zero()) {
            return Err(Error::InvalidParameter("smoothing width must be nonnegative".into()));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn alpha0(&self) -> T {
        self.alpha0
    }

    pub fn alpha1(&self) -> T {
        self.alpha1
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Quasi-Linear slope constant; 1/k is where the Linear schedule has A = B.
    pub fn k(&self) -> T {
        T::one() + (T::one() - self.alpha1) / (T::one() - T::one() / self.alpha0)
    }

    /// Closed forms without smoothing.
    pub fn profile(&self, s: T) -> (T, T) {
        let one = T::one();
        let (a0, a1) = (self.alpha0, self.alpha1);
        match self.kind {
            ScheduleKind::Linear => (one - (one - a1) * s, one - (one - one / a0) * (one - s)),
            ScheduleKind::QuasiLinear => {
                let c = a0 - one;
                (one + c * (one - self.k() * s) / (one + c * s), one)
            }
            ScheduleKind::Sinusoidal => {
                let phase = T::FRAC_PI_2() * (s + T::of(0.5));
                ((a0 - a1) / T::SQRT_2() * phase.cos() + (a0 + a1) * T::of(0.5), one)
            }
        }
    }

    pub fn profile_derivative(&self, s: T) -> (T, T) {
        let one = T::one();
        let (a0, a1) = (self.alpha0, self.alpha1);
        match self.kind {
            ScheduleKind::Linear => (-(one - a1), one - one / a0),
            ScheduleKind::QuasiLinear => {
                let c = a0 - one;
                let d = one + c * s;
                (-c * (self.k() + c) / (d * d), T::zero())
            }
            ScheduleKind::Sinusoidal => {
                let phase = T::FRAC_PI_2() * (s + T::of(0.5));
                (-(a0 - a1) / T::SQRT_2() * T::FRAC_PI_2() * phase.sin(), T::zero())
            }
        }
    }

    fn check(s: T) -> Result<()> {
        if s >= T::zero() && s <= T::one() {
            Ok(())
        } else {
            Err(Error::OutOfDomain(s.as_f64()))
        }
    }

    /// (A(s), B(s)), with s first passed through the smoothing map when σ > 0.
    pub fn evaluate(&self, s: T) -> Result<(T, T)> {
        Self::check(s)?;
        Ok(self.at(s))
    }

    pub fn derivative(&self, s: T) -> Result<(T, T)> {
        Self::check(s)?;
        if self.sigma > T::zero() {
            let (da, db) = self.profile_derivative(smooth_map(s, self.sigma));
            let j = smooth_map_derivative(s, self.sigma);
            Ok((da * j, db * j))
        } else {
            Ok(self.profile_derivative(s))
        }
    }

    /// Unchecked evaluation for callers that already keep s in [0, 1].
    #[inline]
    pub(crate) fn at(&self, s: T) -> (T, T) {
        let s = s.max(T::zero()).min(T::one());
        if self.sigma > T::zero() {
            self.profile(smooth_map(s, self.sigma))
        } else {
            self.profile(s)
        }
    }

    pub fn ratio(&self, s: T) -> Result<T> {
        let (a, b) = self.evaluate(s)?;
        Ok(a / b)
    }

    /// A(0) of the unsmoothed profile (the initial tunnelling energy).
    pub fn initial_tunnelling(&self) -> T {
        self.profile(T::zero()).0
    }
}

/// Anything that supplies (A(s), B(s)) to the dynamics.
pub trait Drive<T>: Sync {
    fn coefficients(&self, s: T) -> (T, T);
}

impl<T: Real> Drive<T> for Schedule<T> {
    fn coefficients(&self, s: T) -> (T, T) {
        self.at(s)
    }
}

/// Time-independent (A, B), for probing the dynamics of a fixed Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frozen<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> Drive<T> for Frozen<T> {
    fn coefficients(&self, _s: T) -> (T, T) {
        (self.a, self.b)
    }
}

/// s' = s(1 − exp(−s²/2σ²)).
pub fn smooth_map<T: Real>(s: T, sigma: T) -> T {
    if sigma <= T::zero() {
        return s;
    }
    s * (T::one() - (-(s * s) / (T::of(2.0) * sigma * sigma)).exp())
}

pub fn smooth_map_derivative<T: Real>(s: T, sigma: T) -> T {
    if sigma <= T::zero() {
        return T::one();
    }
    let e = (-(s * s) / (T::of(2.0) * sigma * sigma)).exp();
    T::one() - e * (T::one() - s * s / (sigma * sigma))
}

/// Smoothing width covering two periods of the initial oscillation: σ = 4πΓ/A0.
pub fn default_sigma<T: Real>(runrate: T, a0: T) -> T {
    T::of(2.0) * T::two_pi() * runrate / a0
}

/// Smoothing choice in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Smoothing {
    /// σ from [`default_sigma`] with the schedule's own A(0).
    #[default]
    Auto,
    Off,
    Sigma(f64),
}

impl Smoothing {
    pub fn sigma(&self, runrate: f64, a0: f64) -> f64 {
        match *self {
            Smoothing::Auto => default_sigma(runrate, a0),
            Smoothing::Off => 0.0,
            Smoothing::Sigma(s) => s,
        }
    }
}

impl FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Smoothing::Auto),
            "off" | "none" => Ok(Smoothing::Off),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| *x >= 0.0)
                .map(Smoothing::Sigma)
                .ok_or_else(|| Error::InvalidParameter(format!("bad smoothing `{s}`"))),
        }
    }
}

impl Serialize for Smoothing {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Smoothing::Auto => ser.serialize_str("auto"),
            Smoothing::Off => ser.serialize_str("off"),
            Smoothing::Sigma(s) => ser.serialize_f64(*s),
        }
    }
}

impl<'de> Deserialize<'de> for Smoothing {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Value(f64),
        }
        match Raw::deserialize(de)? {
            Raw::Word(w) => w.parse().map_err(serde::de::Error::custom),
            Raw::Value(v) if v >= 0.0 => Ok(Smoothing::Sigma(v)),
            Raw::Value(v) => Err(serde::de::Error::custom(format!("negative smoothing width {v}"))),
        }
    }
}

fn default_alpha0() -> f64 {
    5.0
}

fn default_alpha1() -> f64 {
    0.05
}

/// Schedule as written in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    #[serde(default = "default_alpha0")]
    pub alpha0: f64,
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    #[serde(default)]
    pub smoothing: Smoothing,
}

impl ScheduleSpec {
    pub fn new(kind: ScheduleKind) -> Self {
        Self { kind, alpha0: default_alpha0(), alpha1: default_alpha1(), smoothing: Smoothing::Auto }
    }

    /// Unsmoothed schedule (spectra depend only on the path α(s)).
    pub fn unsmoothed<T: Real>(&self) -> Result<Schedule<T>> {
        Schedule::new(self.kind, T::of(self.alpha0), T::of(self.alpha1))
    }

    /// Schedule for a dynamical run at the given rate.
    pub fn for_runrate<T: Real>(&self, runrate: f64) -> Result<Schedule<T>> {
        let base = self.unsmoothed::<T>()?;
        let a0 = base.initial_tunnelling().as_f64();
        base.with_smoothing(T::of(self.smoothing.sigma(runrate, a0)))
    }
}
