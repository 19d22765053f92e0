use nalgebra::{DMatrix, DVector};

use super::rhs::{gamma_from_flat, jacobian_flat, norm, rhs_flat, spectral_eta_with, CoherenceState, DissipationVectorSpec, EtaKind};
use crate::lvn::{factorized_classical, logical_performance, MAX_EVOLVE_CELLS};
use crate::network::{classical_ground, ClassicalGround, QcaNetwork};
use crate::ode::{integrate_bdf1, Bdf1Options, Bdf1Stats, ImplicitSystem};
use crate::quantum::IsingFamily;
use crate::schedule::Drive;
use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IchaOptions {
    /// Base implicit-Euler step; default min(1e-3, Γ/10).
    pub step: Option<f64>,
    /// Uniform sample points of λ (0: finals only).
    pub sampling: usize,
    /// Keep λ after every accepted step.
    pub record_steps: bool,
}

impl Default for IchaOptions {
    fn default() -> Self {
        Self { step: None, sampling: 501, record_steps: false }
    }
}

#[derive(Debug, Clone)]
pub struct IchaInitial<T> {
    pub state: CoherenceState<T>,
    /// ‖Γ×λ − δ(λ − η)‖∞ at s = 0.
    pub residual: T,
    pub iterations: usize,
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct IchaTrajectory<T> {
    /// λ at the uniform sample points.
    pub samples: Vec<CoherenceState<T>>,
    /// λ after every step, if requested.
    pub steps: Vec<CoherenceState<T>>,
    /// Product-state classical performance at s = 1.
    pub q_cl: T,
    pub q_l: T,
    pub final_state: CoherenceState<T>,
    pub initial_residual: T,
    pub initial_fallback: bool,
    pub stats: Bdf1Stats,
}

impl<T: Real> IchaTrajectory<T> {
    /// (s, λ_y) of one cell over the recorded steps (or samples).
    pub fn lambda_y_series(&self, cell: usize) -> Vec<(T, T)> {
        let src = if self.steps.is_empty() { &self.samples } else { &self.steps };
        src.iter().map(|st| (st.s, st.lambdas[cell][1])).collect()
    }
}

/// A network prepared for ICHA runs; the exact Hamiltonian family is only
/// kept when a spectral η needs it.
#[derive(Debug, Clone)]
pub struct IchaModel<T> {
    net: QcaNetwork<T>,
    ground: ClassicalGround<T>,
    fam: Option<IsingFamily<T>>,
}

struct System<'a, T: Real, D> {
    model: &'a IchaModel<T>,
    drive: &'a D,
    spec: DissipationVectorSpec<T>,
    inv_gamma: T,
    cache: Option<(T, Vec<[T; 3]>)>,
}

impl<T: Real, D: Drive<T>> System<'_, T, D> {
    fn eta(&mut self, t: T, a: T, b: T) -> Result<Option<Vec<[T; 3]>>> {
        let EtaKind::Spectral(kind) = self.spec.kind else {
            return Ok(None);
        };
        if let Some((s, e)) = &self.cache {
            if *s == t {
                return Ok(Some(e.clone()));
            }
        }
        let fam = self.model.fam.as_ref().ok_or(Error::TooLarge { n: self.model.net.n_cells(), max: MAX_EVOLVE_CELLS })?;
        let e = spectral_eta_with(fam, &self.model.ground, a, b, kind)?;
        self.cache = Some((t, e.clone()));
        Ok(Some(e))
    }

    fn beta(&self) -> Option<T> {
        match self.spec.kind {
            EtaKind::MeanField { beta } => Some(beta),
            _ => None,
        }
    }
}

impl<T: Real, D: Drive<T>> ImplicitSystem<T> for System<'_, T, D> {
    fn rhs(&mut self, t: T, y: &[T], dy: &mut [T]) -> Result<()> {
        let (a, b) = self.drive.coefficients(t);
        let eta = self.eta(t, a, b)?;
        rhs_flat(&self.model.net, a, b, y, eta.as_deref(), self.beta(), self.spec.rate, self.inv_gamma, dy);
        Ok(())
    }

    fn jacobian(&mut self, t: T, y: &[T], jac: &mut DMatrix<T>) -> Result<()> {
        let (a, b) = self.drive.coefficients(t);
        jacobian_flat(&self.model.net, a, b, y, self.beta(), self.spec.rate, self.inv_gamma, jac);
        Ok(())
    }
}

fn inf_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

impl<T: Real> IchaModel<T> {
    pub fn new(net: &QcaNetwork<T>) -> Result<Self> {
        let ground = classical_ground(net)?;
        let fam = if net.n_cells() <= MAX_EVOLVE_CELLS { Some(IsingFamily::new(net, MAX_EVOLVE_CELLS)?) } else { None };
        Ok(Self { net: net.clone(), ground, fam })
    }

    pub fn network(&self) -> &QcaNetwork<T> {
        &self.net
    }

    pub fn ground(&self) -> &ClassicalGround<T> {
        &self.ground
    }

    fn system<'a, D: Drive<T>>(&'a self, drive: &'a D, spec: DissipationVectorSpec<T>, runrate: T) -> System<'a, T, D> {
        System { model: self, drive, spec, inv_gamma: T::one() / runrate, cache: None }
    }

    /// Newton–Raphson for a stationary λ at s = 0. Coherent runs solve
    /// λ_i = −Γ̂_i(λ) (the local ground state); dissipative runs solve the
    /// full stationarity condition, starting from that root.
    pub fn initial_state(&self, drive: &impl Drive<T>, spec: &DissipationVectorSpec<T>) -> Result<IchaInitial<T>> {
        spec.validate()?;
        let n = self.net.n_cells();
        let (a, b) = drive.coefficients(T::zero());
        let tol = T::tol(1e-13);
        let mut y = vec![T::zero(); 3 * n];
        for i in 0..n {
            y[3 * i] = T::one();
        }
        let mut total = 0;
        let mut fallback = false;

        // local-ground root G(λ) = λ + Γ̂(λ)
        let aligned = |y: &[T]| -> Vec<T> {
            let gam = gamma_from_flat(&self.net, y, a, b);
            let mut g = vec![T::zero(); 3 * n];
            for (i, v) in gam.iter().enumerate() {
                let m = norm(v).max(T::of(1e-300));
                for k in 0..3 {
                    g[3 * i + k] = y[3 * i + k] + v[k] / m;
                }
            }
            g
        };
        let mut converged = false;
        for _ in 0..crate::lvn::NEWTON_MAX_ITERATIONS {
            total += 1;
            let g = aligned(&y);
            if inf_norm(&g) <= tol {
                converged = true;
                break;
            }
            let gam = gamma_from_flat(&self.net, &y, a, b);
            let mut jac = DMatrix::<T>::identity(3 * n, 3 * n);
            for i in 0..n {
                let v = gam[i];
                let m = norm(&v);
                if m < T::of(1e-300) {
                    continue;
                }
                for mcell in 0..n {
                    let e = self.net.kink()[(i, mcell)];
                    if mcell == i || e == T::zero() {
                        continue;
                    }
                    // ∂Γ̂/∂Γ_z · ∂Γ_z/∂λ_z^m
                    let c = -b * e;
                    for r in 0..3 {
                        let id = if r == 2 { T::one() } else { T::zero() };
                        jac[(3 * i + r, 3 * mcell + 2)] += (id - v[r] * v[2] / (m * m)) / m * c;
                    }
                }
            }
            let Some(dx) = jac.lu().solve(&DVector::from_fn(3 * n, |k, _| -g[k])) else { break };
            for k in 0..3 * n {
                y[k] += dx[k];
            }
        }
        if !converged {
            fallback = true;
        }

        if !spec.is_coherent() {
            let mut sys = self.system(drive, *spec, T::one());
            let mut f = vec![T::zero(); 3 * n];
            let mut jac = DMatrix::zeros(3 * n, 3 * n);
            let start = y.clone();
            converged = false;
            for _ in 0..crate::lvn::NEWTON_MAX_ITERATIONS {
                total += 1;
                sys.rhs(T::zero(), &y, &mut f)?;
                if inf_norm(&f) <= tol {
                    converged = true;
                    break;
                }
                sys.jacobian(T::zero(), &y, &mut jac)?;
                let Some(dx) = jac.clone().lu().solve(&DVector::from_fn(3 * n, |k, _| -f[k])) else { break };
                for k in 0..3 * n {
                    y[k] += dx[k];
                }
                if !inf_norm(&y).is_finite() {
                    break;
                }
            }
            if !converged {
                fallback = true;
                y = start;
            }
        }

        let mut sys = self.system(drive, *spec, T::one());
        let mut f = vec![T::zero(); 3 * n];
        sys.rhs(T::zero(), &y, &mut f)?;
        Ok(IchaInitial { state: CoherenceState::from_flat(&y, T::zero()), residual: inf_norm(&f), iterations: total, fallback })
    }

    pub fn evolve(
        &self,
        drive: &impl Drive<T>,
        spec: &DissipationVectorSpec<T>,
        runrate: T,
        opts: &IchaOptions,
    ) -> Result<IchaTrajectory<T>> {
        if !(runrate > T::zero()) {
            return Err(Error::InvalidParameter("run rate must be positive".into()));
        }
        let init = self.initial_state(drive, spec)?;
        let h = T::of(opts.step.unwrap_or_else(|| (1e-3f64).min(runrate.as_f64() / 10.0)));
        let mut sys = self.system(drive, *spec, runrate);

        let grid: Vec<T> = match opts.sampling {
            0 => Vec::new(),
            1 => vec![T::one()],
            m => (0..m).map(|k| T::of(k as f64 / (m - 1) as f64)).collect(),
        };
        let mut samples = Vec::with_capacity(grid.len());
        let mut steps = Vec::new();
        let y0 = init.state.flat();
        let mut next = 0;
        while next < grid.len() && grid[next] <= T::zero() {
            samples.push(CoherenceState::from_flat(&y0, grid[next]));
            next += 1;
        }
        if opts.record_steps {
            steps.push(init.state.clone());
        }
        let mut prev = (T::zero(), y0.clone());
        let (y1, stats) = integrate_bdf1(&mut sys, T::zero(), T::one(), y0, &Bdf1Options::with_step(h), |t, y| {
            while next < grid.len() && grid[next] <= t + T::of(1e-12) {
                let w = if t > prev.0 { ((grid[next] - prev.0) / (t - prev.0)).min(T::one()) } else { T::one() };
                let v: Vec<T> = prev.1.iter().zip(y).map(|(&p, &q)| p + w * (q - p)).collect();
                samples.push(CoherenceState::from_flat(&v, grid[next]));
                next += 1;
            }
            if opts.record_steps {
                steps.push(CoherenceState::from_flat(y, t));
            }
            prev = (t, y.to_vec());
            Ok(())
        })?;
        let final_state = CoherenceState::from_flat(&y1, T::one());
        let z = final_state.polarizations();
        Ok(IchaTrajectory {
            samples,
            steps,
            q_cl: factorized_classical(&z, &self.ground),
            q_l: logical_performance(&z, self.net.outputs(), &self.ground),
            final_state,
            initial_residual: init.residual,
            initial_fallback: init.fallback,
            stats,
        })
    }
}

/// One-shot ICHA run of `net`.
pub fn evolve_icha<T: Real>(
    net: &QcaNetwork<T>,
    drive: &impl Drive<T>,
    spec: &DissipationVectorSpec<T>,
    runrate: T,
    opts: &IchaOptions,
) -> Result<IchaTrajectory<T>> {
    IchaModel::new(net)?.evolve(drive, spec, runrate, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lvn::Relaxation;
    use crate::network::build_device;
    use crate::schedule::{Frozen, ScheduleKind, ScheduleSpec};

    fn net(name: &str) -> QcaNetwork<f64> {
        build_device(&name.parse().unwrap()).unwrap()
    }

    #[test]
    fn coherent_initial_state_is_local_ground() {
        let n = net("wire-5");
        let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).unsmoothed::<f64>().unwrap();
        let m = IchaModel::new(&n).unwrap();
        let init = m.initial_state(&sched, &DissipationVectorSpec::coherent()).unwrap();
        assert!(!init.fallback);
        assert!(init.residual <= 1e-12, "{}", init.residual);
        for l in &init.state.lambdas {
            assert!((norm(l) - 1.0).abs() < 1e-12);
            assert!(l[0] > 0.9);
        }
    }

    #[test]
    fn dissipative_initial_state_is_stationary() {
        let n = net("wire-3");
        let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).unsmoothed::<f64>().unwrap();
        let m = IchaModel::new(&n).unwrap();
        for kind in [EtaKind::Spectral(Relaxation::Boltzmann { beta: 10.0 }), EtaKind::MeanField { beta: 10.0 }] {
            let spec = DissipationVectorSpec::new(kind, 1e-2).unwrap();
            let init = m.initial_state(&sched, &spec).unwrap();
            assert!(!init.fallback && init.residual <= 1e-10, "{kind:?} {}", init.residual);
        }
    }

    #[test]
    fn frozen_precession_preserves_norm() {
        let n = net("wire-3");
        let m = IchaModel::new(&n).unwrap();
        // start from the s=0 ground of a different Hamiltonian to get motion
        let init = m.initial_state(&Frozen { a: 1.0, b: 0.2 }, &DissipationVectorSpec::coherent()).unwrap();
        let mut sys = m.system(&Frozen { a: 1.0, b: 1.0 }, DissipationVectorSpec::coherent(), 0.5);
        let y = init.state.flat();
        let mut f = vec![0.0; y.len()];
        sys.rhs(0.0, &y, &mut f).unwrap();
        for i in 0..n.n_cells() {
            let dot: f64 = (0..3).map(|k| y[3 * i + k] * f[3 * i + k]).sum();
            assert!(dot.abs() < 1e-14);
        }
        assert!(inf_norm(&f) > 1e-3);
    }

    #[test]
    fn adiabatic_wire_reaches_logic() {
        let n = net("wire-5");
        let g = 1e-3;
        let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
        let tr = evolve_icha(&n, &sched, &DissipationVectorSpec::coherent(), g, &IchaOptions { sampling: 11, ..Default::default() }).unwrap();
        assert_eq!(tr.samples.len(), 11);
        assert!(tr.q_l >= 0.99, "{}", tr.q_l);
        assert!(tr.final_state.max_norm() <= 1.0 + 1e-6);
    }
}
