use std::str::FromStr;

use nalgebra::DMatrix;

use crate::lvn::{cell_expectations_mixed, steady_matrix, Relaxation};
use crate::network::{ClassicalGround, QcaNetwork};
use crate::quantum::IsingFamily;
use crate::scalar::Real;
use crate::{Error, Result};

/// Per-cell Bloch vectors λ_i = (λ_x, λ_y, λ_z) at time s.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceState<T> {
    pub lambdas: Vec<[T; 3]>,
    pub s: T,
}

impl<T: Real> CoherenceState<T> {
    pub fn polarizations(&self) -> Vec<T> {
        self.lambdas.iter().map(|l| l[2]).collect()
    }

    pub fn max_norm(&self) -> T {
        self.lambdas.iter().map(|l| norm(l)).fold(T::zero(), |a, b| a.max(b))
    }

    pub(crate) fn flat(&self) -> Vec<T> {
        self.lambdas.iter().flat_map(|l| l.iter().copied()).collect()
    }

    pub(crate) fn from_flat(y: &[T], s: T) -> Self {
        Self { lambdas: y.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(), s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaKind<T> {
    None,
    /// Single-cell expectations of a global steady state.
    Spectral(Relaxation<T>),
    /// Local thermal state η_i = −tanh(β|Γ_i|/2) Γ̂_i.
    MeanField { beta: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationVectorSpec<T> {
    pub kind: EtaKind<T>,
    pub rate: T,
}

impl<T: Real> DissipationVectorSpec<T> {
    pub fn coherent() -> Self {
        Self { kind: EtaKind::None, rate: T::zero() }
    }

    pub fn new(kind: EtaKind<T>, rate: T) -> Result<Self> {
        let s = Self { kind, rate };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EtaKind::None if self.rate == T::zero() => Ok(()),
            EtaKind::None => Err(Error::InvalidParameter("coherent runs take no dissipation rate".into())),
            EtaKind::MeanField { beta } if !(beta > T::zero()) => {
                Err(Error::InvalidParameter("inverse temperature must be positive".into()))
            }
            EtaKind::Spectral(Relaxation::None) => Err(Error::InvalidParameter("spectral target missing".into())),
            EtaKind::Spectral(Relaxation::Boltzmann { beta }) if !(beta > T::zero()) => {
                Err(Error::InvalidParameter("inverse temperature must be positive".into()))
            }
            _ if self.rate > T::zero() => Ok(()),
            _ => Err(Error::InvalidParameter("dissipation rate must be positive".into())),
        }
    }

    pub fn is_coherent(&self) -> bool {
        matches!(self.kind, EtaKind::None)
    }
}

impl<T: Real> FromStr for EtaKind<T> {
    type Err = Error;

    /// As [`Relaxation`], plus `meanfield:beta=..`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        match head.trim().to_ascii_lowercase().as_str() {
            "meanfield" | "mean-field" | "mf" => crate::lvn::parse_args(args)?
                .into_iter()
                .find(|(k, _)| k == "beta")
                .map(|(_, b)| EtaKind::MeanField { beta: T::of(b) })
                .ok_or_else(|| Error::InvalidParameter("meanfield needs beta=<value>".into())),
            _ => match s.parse::<Relaxation<T>>()? {
                Relaxation::None => Ok(EtaKind::None),
                r => Ok(EtaKind::Spectral(r)),
            },
        }
    }
}

pub(crate) fn norm<T: Real>(v: &[T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// h̃_i(λ) = h_i − Σ_n E_in λ_z^n.
fn effective_fields<T: Real>(net: &QcaNetwork<T>, z: impl Fn(usize) -> T) -> Vec<T> {
    let n = net.n_cells();
    let k = net.kink();
    (0..n)
        .map(|i| {
            let mut h = net.bias()[i];
            for m in 0..n {
                if m != i {
                    h -= k[(i, m)] * z(m);
                }
            }
            h
        })
        .collect()
}

/// Γ_i = (−A, 0, B·h̃_i).
pub fn gamma_vectors<T: Real>(net: &QcaNetwork<T>, lambdas: &[[T; 3]], a: T, b: T) -> Vec<[T; 3]> {
    effective_fields(net, |m| lambdas[m][2]).into_iter().map(|h| [-a, T::zero(), b * h]).collect()
}

pub(crate) fn gamma_from_flat<T: Real>(net: &QcaNetwork<T>, y: &[T], a: T, b: T) -> Vec<[T; 3]> {
    effective_fields(net, |m| y[3 * m + 2]).into_iter().map(|h| [-a, T::zero(), b * h]).collect()
}

/// η_i = −tanh(β|Γ_i|/2) Γ̂_i, with η_i = 0 when |Γ_i| vanishes.
pub fn mean_field_eta<T: Real>(gammas: &[[T; 3]], beta: T) -> Vec<[T; 3]> {
    gammas
        .iter()
        .map(|g| {
            let m = norm(g);
            if m < T::of(1e-12) {
                return [T::zero(); 3];
            }
            let f = (beta * m * T::of(0.5)).tanh() / m;
            [-f * g[0], -f * g[1], -f * g[2]]
        })
        .collect()
}

/// ∂η/∂Γ for the mean-field target.
fn mean_field_eta_jacobian<T: Real>(g: &[T; 3], beta: T) -> [[T; 3]; 3] {
    let m = norm(g);
    let half = beta * T::of(0.5);
    let mut j = [[T::zero(); 3]; 3];
    if m < T::of(1e-12) {
        for (k, row) in j.iter_mut().enumerate() {
            row[k] = -half;
        }
        return j;
    }
    let x = half * m;
    let f = x.tanh() / m;
    let c = x.cosh();
    let fp = half / (c * c);
    let u = [g[0] / m, g[1] / m, g[2] / m];
    for r in 0..3 {
        for s in 0..3 {
            let proj = u[r] * u[s];
            let id = if r == s { T::one() } else { T::zero() };
            j[r][s] = -(f * (id - proj) + fp * proj);
        }
    }
    j
}

/// Single-point expectations η_i = tr(ρ_ss σ^i) of a global steady state.
pub fn spectral_eta<T: Real>(net: &QcaNetwork<T>, a: T, b: T, kind: Relaxation<T>) -> Result<Vec<[T; 3]>> {
    let fam = IsingFamily::new(net, crate::lvn::MAX_EVOLVE_CELLS)?;
    let ground = crate::network::classical_ground(net)?;
    spectral_eta_with(&fam, &ground, a, b, kind)
}

pub(crate) fn spectral_eta_with<T: Real>(
    fam: &IsingFamily<T>,
    ground: &ClassicalGround<T>,
    a: T,
    b: T,
    kind: Relaxation<T>,
) -> Result<Vec<[T; 3]>> {
    let m = steady_matrix(fam, ground, a, b, kind)?;
    let d = fam.dim();
    let zeros = vec![T::zero(); d * d];
    Ok(cell_expectations_mixed(m.as_slice(), &zeros, d))
}

/// Γ dλ_i/ds = Γ_i × λ_i − δ(λ_i − η_i), written into `out` (flat, 3N).
pub(crate) fn rhs_flat<T: Real>(
    net: &QcaNetwork<T>,
    a: T,
    b: T,
    y: &[T],
    eta: Option<&[[T; 3]]>,
    mean_field_beta: Option<T>,
    rate: T,
    inv_gamma: T,
    out: &mut [T],
) {
    let gam = gamma_from_flat(net, y, a, b);
    let mf = mean_field_beta.map(|beta| mean_field_eta(&gam, beta));
    for (i, g) in gam.iter().enumerate() {
        let l = [y[3 * i], y[3 * i + 1], y[3 * i + 2]];
        let c = cross(g, &l);
        for k in 0..3 {
            let target = match (&mf, eta) {
                (Some(m), _) => m[i][k],
                (None, Some(e)) => e[i][k],
                (None, None) => T::zero(),
            };
            let relax = if rate > T::zero() { rate * (l[k] - target) } else { T::zero() };
            out[3 * i + k] = (c[k] - relax) * inv_gamma;
        }
    }
}

/// Analytic Jacobian of [`rhs_flat`] with respect to the flat state.
pub(crate) fn jacobian_flat<T: Real>(
    net: &QcaNetwork<T>,
    a: T,
    b: T,
    y: &[T],
    mean_field_beta: Option<T>,
    rate: T,
    inv_gamma: T,
    jac: &mut DMatrix<T>,
) {
    let n = net.n_cells();
    jac.fill(T::zero());
    let gam = gamma_from_flat(net, y, a, b);
    for i in 0..n {
        let g = gam[i];
        let l = [y[3 * i], y[3 * i + 1], y[3 * i + 2]];
        let skew = [[T::zero(), -g[2], g[1]], [g[2], T::zero(), -g[0]], [-g[1], g[0], T::zero()]];
        for r in 0..3 {
            for c in 0..3 {
                jac[(3 * i + r, 3 * i + c)] = skew[r][c];
            }
            jac[(3 * i + r, 3 * i + r)] -= rate;
        }
        let deta = mean_field_beta.map(|beta| mean_field_eta_jacobian(&g, beta));
        for m in 0..n {
            let e = net.kink()[(i, m)];
            if m == i || e == T::zero() {
                continue;
            }
            // ∂Γ_i/∂λ_z^m = (0, 0, −B E_im)
            let c = -b * e;
            jac[(3 * i, 3 * m + 2)] += -c * l[1];
            jac[(3 * i + 1, 3 * m + 2)] += c * l[0];
            if let Some(dj) = &deta {
                for r in 0..3 {
                    jac[(3 * i + r, 3 * m + 2)] += rate * dj[r][2] * c;
                }
            }
        }
    }
    *jac *= inv_gamma;
}

/// Public form of the right-hand side for one state.
pub fn icha_rhs<T: Real>(
    state: &CoherenceState<T>,
    net: &QcaNetwork<T>,
    a: T,
    b: T,
    spec: &DissipationVectorSpec<T>,
    runrate: T,
) -> Result<Vec<[T; 3]>> {
    spec.validate()?;
    let y = state.flat();
    let mut out = vec![T::zero(); y.len()];
    let inv = T::one() / runrate;
    match spec.kind {
        EtaKind::None => rhs_flat(net, a, b, &y, None, None, T::zero(), inv, &mut out),
        EtaKind::MeanField { beta } => rhs_flat(net, a, b, &y, None, Some(beta), spec.rate, inv, &mut out),
        EtaKind::Spectral(kind) => {
            let eta = spectral_eta(net, a, b, kind)?;
            rhs_flat(net, a, b, &y, Some(&eta), None, spec.rate, inv, &mut out)
        }
    }
    Ok(CoherenceState::from_flat(&out, state.s).lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_device;

    fn wire3() -> QcaNetwork<f64> {
        build_device(&"wire-3".parse().unwrap()).unwrap()
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let net: QcaNetwork<f64> = build_device(&"maj-101".parse().unwrap()).unwrap();
        let n = net.n_cells();
        let y: Vec<f64> = (0..3 * n).map(|k| 0.3 * ((k as f64) * 0.77).sin()).collect();
        for beta in [None, Some(3.0)] {
            let mut jac = DMatrix::zeros(3 * n, 3 * n);
            jacobian_flat(&net, 0.8, 0.6, &y, beta, 0.2, 2.0, &mut jac);
            let h = 1e-6;
            for c in 0..3 * n {
                let (mut yp, mut ym) = (y.clone(), y.clone());
                yp[c] += h;
                ym[c] -= h;
                let (mut fp, mut fm) = (vec![0.0; 3 * n], vec![0.0; 3 * n]);
                rhs_flat(&net, 0.8, 0.6, &yp, None, beta, 0.2, 2.0, &mut fp);
                rhs_flat(&net, 0.8, 0.6, &ym, None, beta, 0.2, 2.0, &mut fm);
                for r in 0..3 * n {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    assert!((fd - jac[(r, c)]).abs() < 1e-7, "({r},{c}) {fd} {}", jac[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn mean_field_eta_limits() {
        let g: [[f64; 3]; 1] = [[-0.3, 0.0, 0.8]];
        let e = mean_field_eta(&g, 2.0);
        let m = norm(&g[0]);
        assert!((norm(&e[0]) - (m).tanh()).abs() < 1e-15);
        let cold = mean_field_eta(&g, 1e6);
        assert!((cold[0][2] + 0.8 / m).abs() < 1e-15);
        assert_eq!(mean_field_eta(&g, 0.0)[0], [0.0; 3]);
        assert_eq!(mean_field_eta(&[[0.0; 3]], 5.0)[0], [0.0; 3]);
    }

    #[test]
    fn classical_spectral_eta_is_polarization() {
        let net = wire3();
        let g = crate::network::classical_ground(&net).unwrap();
        let eta = spectral_eta(&net, 0.7, 1.0, Relaxation::Classical).unwrap();
        for (i, e) in eta.iter().enumerate() {
            assert_eq!([e[0], e[1]], [0.0, 0.0]);
            assert!((e[2] - g.polarization(i)).abs() < 1e-15);
        }
        let x = spectral_eta(&net, 500.0, 1.0, Relaxation::Ground).unwrap();
        assert!(x.iter().all(|e| e[0] > 0.999));
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("meanfield:beta=10".parse::<EtaKind<f64>>().unwrap(), EtaKind::MeanField { beta: 10.0 });
        assert_eq!("ground".parse::<EtaKind<f64>>().unwrap(), EtaKind::Spectral(Relaxation::Ground));
        assert_eq!("none".parse::<EtaKind<f64>>().unwrap(), EtaKind::None);
        assert!(DissipationVectorSpec::new(EtaKind::MeanField { beta: 1.0 }, 0.0).is_err());
    }
}
