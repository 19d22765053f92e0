use std::str::FromStr;

use nalgebra::DMatrix;

use super::DensityState;
use crate::network::{classical_ground, ClassicalGround, QcaNetwork};
use crate::quantum::{ground_projector, symmetric_eigen, Eigensystem, IsingFamily, MAX_DENSE_CELLS};
use crate::scalar::Real;
use crate::{Error, Result};

/// Target of the relaxation term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaxation<T> {
    None,
    /// e^{−βH̃}/Z.
    Boltzmann { beta: T },
    /// Normalized instantaneous ground projector.
    Ground,
    /// Normalized classical ground projector.
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationSpec<T> {
    pub kind: Relaxation<T>,
    pub rate: T,
}

impl<T: Real> DissipationSpec<T> {
    pub fn coherent() -> Self {
        Self { kind: Relaxation::None, rate: T::zero() }
    }

    pub fn new(kind: Relaxation<T>, rate: T) -> Result<Self> {
        let spec = Self { kind, rate };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Relaxation::Boltzmann { beta } = self.kind {
            if !(beta > T::zero()) {
                return Err(Error::InvalidParameter("inverse temperature must be positive".into()));
            }
        }
        match (self.kind, self.rate > T::zero()) {
            (Relaxation::None, false) if self.rate == T::zero() => Ok(()),
            (Relaxation::None, _) => Err(Error::InvalidParameter("coherent runs take no dissipation rate".into())),
            (_, true) => Ok(()),
            (_, false) => Err(Error::InvalidParameter("dissipation rate must be positive".into())),
        }
    }

    pub fn is_coherent(&self) -> bool {
        matches!(self.kind, Relaxation::None)
    }
}

impl<T: Real> FromStr for Relaxation<T> {
    type Err = Error;

    /// `none`, `ground`, `classical`, `boltzmann:beta=10`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let beta = parse_args(args)?.into_iter().find(|(k, _)| k == "beta").map(|(_, v)| T::of(v));
        match head.trim().to_ascii_lowercase().as_str() {
            "none" | "coherent" => Ok(Relaxation::None),
            "ground" => Ok(Relaxation::Ground),
            "classical" => Ok(Relaxation::Classical),
            "boltzmann" => beta
                .map(|beta| Relaxation::Boltzmann { beta })
                .ok_or_else(|| Error::InvalidParameter("boltzmann needs beta=<value>".into())),
            other => Err(Error::InvalidParameter(format!("unknown steady state `{other}`"))),
        }
    }
}

/// Splits `key=value,key=value`.
pub fn parse_args(args: &str) -> Result<Vec<(String, f64)>> {
    args.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{p}`")))?;
            let v: f64 =
                v.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad number in `{p}`")))?;
            Ok((k.trim().to_ascii_lowercase(), v))
        })
        .collect()
}

/// Thermal state from a full eigensystem; exponents are shifted by E0.
pub fn boltzmann_matrix<T: Real>(eig: &Eigensystem<T>, beta: T) -> DMatrix<T> {
    let e0 = eig.values[0];
    let w: Vec<T> = eig.values.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z = w.iter().fold(T::zero(), |a, b| a + *b);
    let keep: Vec<usize> = (0..w.len()).filter(|&k| w[k] > T::of(1e-18) * z).collect();
    let d = eig.dim();
    let scaled = DMatrix::from_fn(d, keep.len(), |r, c| eig.vectors[(r, keep[c])] * (w[keep[c]] / z).sqrt());
    &scaled * scaled.transpose()
}

pub(crate) fn classical_matrix<T: Real>(ground: &ClassicalGround<T>) -> DMatrix<T> {
    let d = 1 << ground.polarizations.len();
    let mut m = DMatrix::zeros(d, d);
    let w = T::one() / T::of(ground.configurations.len() as f64);
    for &c in &ground.configurations {
        m[(c, c)] = w;
    }
    m
}

/// Real steady-state matrix for the given relaxation target.
pub(crate) fn steady_matrix<T: Real>(
    fam: &IsingFamily<T>,
    ground: &ClassicalGround<T>,
    a: T,
    b: T,
    kind: Relaxation<T>,
) -> Result<DMatrix<T>> {
    match kind {
        Relaxation::None => Err(Error::InvalidParameter("coherent runs have no steady state".into())),
        Relaxation::Classical => Ok(classical_matrix(ground)),
        Relaxation::Boltzmann { beta } => {
            let eig = symmetric_eigen(&fam.dense(a, b), fam.dim())?;
            Ok(boltzmann_matrix(&eig, beta))
        }
        Relaxation::Ground => {
            let eig = symmetric_eigen(&fam.dense(a, b), fam.dim())?;
            Ok(DensityState::from_projector(&ground_projector(&eig), T::zero()).re)
        }
    }
}

/// ρ_ss for H̃(A, B).
pub fn steady_state<T: Real>(net: &QcaNetwork<T>, a: T, b: T, spec: &DissipationSpec<T>) -> Result<DensityState<T>> {
    spec.validate()?;
    let fam = IsingFamily::new(net, MAX_DENSE_CELLS)?;
    let ground = classical_ground(net)?;
    Ok(DensityState::from_real(steady_matrix(&fam, &ground, a, b, spec.kind)?, T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_device;
    use nalgebra::DVector;

    #[test]
    fn zero_temperature_limit_is_ground_projector() {
        let net: QcaNetwork<f64> = build_device(&"maj-101".parse().unwrap()).unwrap();
        let hot = steady_state(&net, 0.3, 1.0, &DissipationSpec::new(Relaxation::Boltzmann { beta: 1e6 }, 1.0).unwrap()).unwrap();
        let g = steady_state(&net, 0.3, 1.0, &DissipationSpec::new(Relaxation::Ground, 1.0).unwrap()).unwrap();
        assert!((hot.re - g.re).abs().max() < 1e-8);
    }

    #[test]
    fn classical_target_is_fixed_and_rank_one() {
        let net: QcaNetwork<f64> = build_device(&"wire-3".parse().unwrap()).unwrap();
        let spec = DissipationSpec::new(Relaxation::Classical, 1.0).unwrap();
        let a = steady_state(&net, 5.0, 0.2, &spec).unwrap();
        let b = steady_state(&net, 0.05, 1.0, &spec).unwrap();
        assert_eq!(a.re, b.re);
        assert!((a.purity() - 1.0).abs() < 1e-15);
        assert_eq!(a.re.iter().filter(|x| **x != 0.0).count(), 1);
    }

    #[test]
    fn thermal_two_level_oracle() {
        // H = ½(−σ_x + σ_z): e^{−βH} = cosh(β|Γ|/2) − sinh(β|Γ|/2) Γ̂·σ with |Γ| = √2
        let lone = QcaNetwork::from_parts(DMatrix::zeros(1, 1), DVector::from_element(1, 1.0), vec![0]).unwrap();
        let beta = 2.0;
        let r = steady_state(&lone, 1.0, 1.0, &DissipationSpec::new(Relaxation::Boltzmann { beta }, 1.0).unwrap()).unwrap();
        let z = r.cell_expectations()[0][2];
        let want = -(beta * 2f64.sqrt() / 2.0).tanh() / 2f64.sqrt();
        assert!((z - want).abs() < 1e-13);
    }

    #[test]
    fn spec_validation_and_parsing() {
        assert!(DissipationSpec::new(Relaxation::Boltzmann { beta: -1.0 }, 1.0).is_err());
        assert!(DissipationSpec::new(Relaxation::Ground, 0.0).is_err());
        assert!(DissipationSpec::<f64>::new(Relaxation::None, 1e-3).is_err());
        assert_eq!("boltzmann:beta=10".parse::<Relaxation<f64>>().unwrap(), Relaxation::Boltzmann { beta: 10.0 });
        assert!("boltzmann".parse::<Relaxation<f64>>().is_err());
        assert_eq!("Classical".parse::<Relaxation<f64>>().unwrap(), Relaxation::Classical);
    }
}
