use nalgebra::DMatrix;

use super::density::{cell_expectations_mixed, cell_expectations_pure, hermitize_parts};
use super::initial::{initial_state_with, InitialState};
use super::metrics::{logical_performance, Metrics};
use super::steady::{steady_matrix, DissipationSpec, Relaxation};
use super::DensityState;
use crate::network::{classical_ground, ClassicalGround, QcaNetwork};
use crate::ode::{integrate_dopri5, DenseStep, DopriOptions, DopriStats, OdeSystem};
use crate::quantum::{classical_projector, ground_projector, symmetric_eigen, IsingFamily};
use crate::schedule::Drive;
use crate::scalar::Real;
use crate::{Error, Result};

/// Largest network evolved exactly.
pub const MAX_EVOLVE_CELLS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Number of uniform sample points for Q_A (0: finals only).
    pub sampling: usize,
    /// Also record per-cell Bloch components at the sample points.
    pub record_cells: bool,
    /// Integrate ρ even when a pure state ψ would do.
    pub force_density: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, sampling: 501, record_cells: false, force_density: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTrace<T> {
    /// (s, Q_A(s)).
    pub samples: Vec<(T, T)>,
    pub q_cl: T,
    pub q_l: T,
    pub q_a: T,
}

impl<T: Real> MetricsTrace<T> {
    pub fn finals(&self) -> Metrics<T> {
        Metrics { q_a: self.q_a, q_cl: self.q_cl, q_l: self.q_l }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub trace: MetricsTrace<T>,
    /// (s, per-cell ⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) at the sample points, if recorded.
    pub cells: Vec<(T, Vec<[T; 3]>)>,
    pub final_state: DensityState<T>,
    pub initial_residual: T,
    pub initial_fallback: bool,
    /// Whether the state was propagated as a wavefunction.
    pub pure: bool,
    pub stats: DopriStats,
}

/// A network prepared for repeated exact evolution.
#[derive(Debug, Clone)]
pub struct LvnModel<T> {
    net: QcaNetwork<T>,
    fam: IsingFamily<T>,
    ground: ClassicalGround<T>,
}

impl<T: Real> LvnModel<T> {
    pub fn new(net: &QcaNetwork<T>) -> Result<Self> {
        Ok(Self {
            fam: IsingFamily::new(net, MAX_EVOLVE_CELLS)?,
            ground: classical_ground(net)?,
            net: net.clone(),
        })
    }

    pub fn network(&self) -> &QcaNetwork<T> {
        &self.net
    }

    pub fn family(&self) -> &IsingFamily<T> {
        &self.fam
    }

    pub fn ground(&self) -> &ClassicalGround<T> {
        &self.ground
    }

    pub fn initial_state(&self, sched: &impl Drive<T>, spec: &DissipationSpec<T>) -> Result<InitialState<T>> {
        spec.validate()?;
        initial_state_with(&self.fam, &self.ground, sched, spec)
    }

    /// Q_A against the ground space of H̃(s), plus Q_cl and Q_L.
    fn sample_metrics(&self, sched: &impl Drive<T>, s: T, re: &[T], z: &[T], pure: Option<(&[T], &[T])>) -> Result<Metrics<T>> {
        let (a, b) = sched.coefficients(s);
        let eig = symmetric_eigen(&self.fam.dense(a, b), self.fam.dim())?;
        let pg = ground_projector(&eig);
        let pc = classical_projector(&self.ground);
        let (q_a, q_cl) = match pure {
            Some((u, v)) => (pg.expectation_pure(u, v), pc.expectation_pure(u, v)),
            None => {
                let d = self.fam.dim();
                let m = DMatrix::from_column_slice(d, d, re);
                (pg.expectation(&m), pc.expectation(&m))
            }
        };
        Ok(Metrics { q_a, q_cl, q_l: logical_performance(z, self.net.outputs(), &self.ground) })
    }

    /// Integrates Γ dρ/ds = −i[H̃, ρ] − δ(ρ − ρ_ss) over s ∈ [0, 1].
    pub fn evolve(
        &self,
        sched: &impl Drive<T>,
        spec: &DissipationSpec<T>,
        runrate: T,
        opts: &EvolveOptions,
    ) -> Result<Trajectory<T>> {
        if !(runrate > T::zero()) {
            return Err(Error::InvalidParameter("switching rate must be positive".into()));
        }
        let init = self.initial_state(sched, spec)?;
        let d = self.fam.dim();
        let pure = spec.is_coherent() && !opts.force_density && init.ground_rank == 1;
        let dopts = DopriOptions { rtol: T::tol(opts.rtol), atol: T::tol(opts.atol), ..DopriOptions::default() };
        let times: Vec<T> = match opts.sampling {
            0 => Vec::new(),
            1 => vec![T::one()],
            n => (0..n).map(|k| if k == n - 1 { T::one() } else { T::of(k as f64 / (n - 1) as f64) }).collect(),
        };

        let mut samples = Vec::with_capacity(times.len());
        let mut cells = Vec::new();
        let mut next = 0;
        let mut buf = Vec::new();
        let mut record = |s: T, y: &[T]| -> Result<()> {
            let (bloch, m) = if pure {
                let (u, v) = y.split_at(d);
                let bloch = cell_expectations_pure(u, v);
                let z: Vec<T> = bloch.iter().map(|e| e[2]).collect();
                (bloch, self.sample_metrics(sched, s, &[], &z, Some((u, v)))?)
            } else {
                let (re, im) = y.split_at(d * d);
                let bloch = cell_expectations_mixed(re, im, d);
                let z: Vec<T> = bloch.iter().map(|e| e[2]).collect();
                (bloch, self.sample_metrics(sched, s, re, &z, None)?)
            };
            samples.push((s, m.q_a));
            if opts.record_cells {
                cells.push((s, bloch));
            }
            Ok(())
        };

        let y0 = if pure {
            // the rank-1 ground projector is |v⟩⟨v| with v real
            let eig = symmetric_eigen(&init.state.re, d)?;
            let v = eig.vectors.column(d - 1);
            let mut y = v.iter().copied().collect::<Vec<T>>();
            y.extend(std::iter::repeat_n(T::zero(), d));
            y
        } else {
            let mut y = init.state.re.as_slice().to_vec();
            y.extend_from_slice(init.state.im.as_slice());
            y
        };
        while next < times.len() && times[next] <= T::zero() {
            record(times[next], &y0)?;
            next += 1;
        }
        let observer = |step: &DenseStep<'_, T>| -> Result<()> {
            while next < times.len() && times[next] <= step.t_new() {
                buf.resize(y0.len(), T::zero());
                step.eval(times[next], &mut buf);
                record(times[next], &buf)?;
                next += 1;
            }
            Ok(())
        };
        let inv_gamma = T::one() / runrate;
        let (y1, stats) = if pure {
            let mut sys = PureRhs { fam: &self.fam, sched, inv_gamma, hu: vec![T::zero(); d] };
            integrate_dopri5(&mut sys, T::zero(), T::one(), y0.clone(), &dopts, observer, |_: &mut [T]| {})?
        } else {
            let mut sys = DensityRhs {
                fam: &self.fam,
                ground: &self.ground,
                sched,
                kind: spec.kind,
                rate: spec.rate,
                inv_gamma,
                cache: Vec::new(),
            };
            integrate_dopri5(&mut sys, T::zero(), T::one(), y0.clone(), &dopts, observer, |y: &mut [T]| {
                let (re, im) = y.split_at_mut(d * d);
                hermitize_parts(re, im, d);
            })?
        };

        let final_state = if pure {
            let (u, v) = y1.split_at(d);
            DensityState::pure(u, v, T::one())
        } else {
            let (re, im) = y1.split_at(d * d);
            DensityState {
                re: DMatrix::from_column_slice(d, d, re),
                im: DMatrix::from_column_slice(d, d, im),
                s: T::one(),
            }
        };
        let z: Vec<T> = final_state.cell_expectations().iter().map(|e| e[2]).collect();
        let fin = self.sample_metrics(sched, T::one(), final_state.re.as_slice(), &z, None)?;
        Ok(Trajectory {
            trace: MetricsTrace { samples, q_cl: fin.q_cl, q_l: fin.q_l, q_a: fin.q_a },
            cells,
            final_state,
            initial_residual: init.residual,
            initial_fallback: init.fallback,
            pure,
            stats,
        })
    }
}

struct PureRhs<'a, T, D> {
    fam: &'a IsingFamily<T>,
    sched: &'a D,
    inv_gamma: T,
    hu: Vec<T>,
}

impl<T: Real, D: Drive<T>> OdeSystem<T> for PureRhs<'_, T, D> {
    fn rhs(&mut self, s: T, y: &[T], dy: &mut [T]) -> Result<()> {
        let d = self.fam.dim();
        let (a, b) = self.sched.coefficients(s);
        let (u, v) = y.split_at(d);
        let (du, dv) = dy.split_at_mut(d);
        // Γ dψ/ds = −iHψ: u' = Hv/Γ, v' = −Hu/Γ
        self.fam.apply(a, b, v, du);
        self.fam.apply(a, b, u, &mut self.hu);
        for k in 0..d {
            du[k] *= self.inv_gamma;
            dv[k] = -self.hu[k] * self.inv_gamma;
        }
        Ok(())
    }
}

struct DensityRhs<'a, T, D> {
    fam: &'a IsingFamily<T>,
    ground: &'a ClassicalGround<T>,
    sched: &'a D,
    kind: Relaxation<T>,
    rate: T,
    inv_gamma: T,
    /// Recent steady states keyed on s.
    cache: Vec<(T, DMatrix<T>)>,
}

const CACHE_SLOTS: usize = 8;

impl<T: Real, D: Drive<T>> DensityRhs<'_, T, D> {
    fn steady(&mut self, s: T) -> Result<usize> {
        let tol = T::of(1e-12);
        if let Some(k) = self.cache.iter().position(|(key, _)| (*key - s).abs() <= tol || matches!(self.kind, Relaxation::Classical)) {
            return Ok(k);
        }
        let (a, b) = self.sched.coefficients(s);
        let m = steady_matrix(self.fam, self.ground, a, b, self.kind)?;
        if self.cache.len() == CACHE_SLOTS {
            self.cache.remove(0);
        }
        self.cache.push((s, m));
        Ok(self.cache.len() - 1)
    }
}

impl<T: Real, D: Drive<T>> OdeSystem<T> for DensityRhs<'_, T, D> {
    fn rhs(&mut self, s: T, y: &[T], dy: &mut [T]) -> Result<()> {
        let d = self.fam.dim();
        let (a, b) = self.sched.coefficients(s);
        let (re, im) = y.split_at(d * d);
        let (dre, dim) = dy.split_at_mut(d * d);
        self.fam.commutator(a, b, im, dre);
        self.fam.commutator(a, b, re, dim);
        let g = self.inv_gamma;
        if self.rate > T::zero() {
            let k = self.steady(s)?;
            let ss = self.cache[k].1.as_slice();
            let r = self.rate;
            for i in 0..d * d {
                dre[i] = (dre[i] - r * (re[i] - ss[i])) * g;
                dim[i] = (-dim[i] - r * im[i]) * g;
            }
        } else {
            for i in 0..d * d {
                dre[i] *= g;
                dim[i] = -dim[i] * g;
            }
        }
        Ok(())
    }
}

/// Initial state of a dissipative or coherent run (see [`LvnModel::initial_state`]).
pub fn initial_state<T: Real>(
    net: &QcaNetwork<T>,
    sched: &impl Drive<T>,
    spec: &DissipationSpec<T>,
) -> Result<InitialState<T>> {
    LvnModel::new(net)?.initial_state(sched, spec)
}

pub fn evolve<T: Real>(
    net: &QcaNetwork<T>,
    sched: &impl Drive<T>,
    spec: &DissipationSpec<T>,
    runrate: T,
    opts: &EvolveOptions,
) -> Result<Trajectory<T>> {
    LvnModel::new(net)?.evolve(sched, spec, runrate, opts)
}
