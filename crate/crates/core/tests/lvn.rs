use qca_clocking::lvn::{DissipationSpec, EvolveOptions, LvnModel, Relaxation};
use qca_clocking::network::{build_device, QcaNetwork};
use qca_clocking::quantum::IsingFamily;
use qca_clocking::schedule::{Drive, ScheduleKind, ScheduleSpec};

fn net(name: &str) -> QcaNetwork<f64> {
    build_device(&name.parse().unwrap()).unwrap()
}

/// H(0) prepares the state, then the Hamiltonian jumps to (a, b) for s > 0.
struct Quench {
    before: (f64, f64),
    after: (f64, f64),
}

impl Drive<f64> for Quench {
    fn coefficients(&self, s: f64) -> (f64, f64) {
        if s <= 0.0 { self.before } else { self.after }
    }
}

#[test]
fn coherent_initial_state_is_stationary() {
    let n = net("maj-101");
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).unsmoothed::<f64>().unwrap();
    let init = LvnModel::new(&n).unwrap().initial_state(&sched, &DissipationSpec::coherent()).unwrap();
    assert!(!init.fallback);
    assert!(init.residual <= 1e-12, "{}", init.residual);
    assert!((init.state.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn thermal_initial_state_is_a_root() {
    let n = net("wire-3");
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).unsmoothed::<f64>().unwrap();
    let spec = DissipationSpec::new(Relaxation::Boltzmann { beta: 10.0 }, 1e-2).unwrap();
    let model = LvnModel::new(&n).unwrap();
    let init = model.initial_state(&sched, &spec).unwrap();
    assert!(!init.fallback && init.residual <= 1e-10, "{}", init.residual);
    let tr = model.evolve(&sched, &spec, 0.5, &EvolveOptions { sampling: 3, ..Default::default() }).unwrap();
    assert!(tr.trace.samples[0].1 >= 0.9, "{:?}", tr.trace.samples[0]);
}

#[test]
fn quench_conserves_trace_purity_and_energy() {
    let n = net("wire-3");
    let model = LvnModel::new(&n).unwrap();
    let drive = Quench { before: (5.0, 1.0), after: (0.6, 1.0) };
    let opts = EvolveOptions { sampling: 0, force_density: true, rtol: 1e-10, atol: 1e-12, ..Default::default() };
    let init = model.initial_state(&drive, &DissipationSpec::coherent()).unwrap();
    let tr = model.evolve(&drive, &DissipationSpec::coherent(), 0.05, &opts).unwrap();
    assert!(!tr.pure);
    let rho = &tr.final_state;
    let fam = IsingFamily::new(&n, 10).unwrap();
    let (a, b) = drive.after;
    assert!((rho.trace() - 1.0).abs() < 1e-9, "trace {}", rho.trace());
    assert!((rho.purity() - 1.0).abs() < 1e-7, "purity {}", rho.purity());
    assert!(rho.hermiticity_error() < 1e-12);
    let e0 = init.state.energy(&fam, a, b);
    assert!((rho.energy(&fam, a, b) - e0).abs() < 1e-7);
    // and the state did move
    assert!((&rho.re - &init.state.re).norm() > 1e-2);
}

#[test]
fn wavefunction_and_density_paths_agree() {
    let n = net("maj-101");
    let model = LvnModel::new(&n).unwrap();
    let g = 2e-2;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
    let base = EvolveOptions { sampling: 0, rtol: 1e-10, atol: 1e-12, ..Default::default() };
    let pure = model.evolve(&sched, &DissipationSpec::coherent(), g, &base).unwrap();
    let dense = model.evolve(&sched, &DissipationSpec::coherent(), g, &EvolveOptions { force_density: true, ..base }).unwrap();
    assert!(pure.pure && !dense.pure);
    for (p, d) in [(pure.trace.q_a, dense.trace.q_a), (pure.trace.q_cl, dense.trace.q_cl), (pure.trace.q_l, dense.trace.q_l)] {
        assert!((p - d).abs() < 1e-6, "{p} {d}");
    }
}

#[test]
fn deep_adiabatic_ratio_is_final_overlap() {
    // Q_cl/Q_A → Q1 = 1 − α1²(N+3)/16 when the run is adiabatic
    let n = net("wire-5");
    let g = 1e-3;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
    let tr = LvnModel::new(&n).unwrap().evolve(&sched, &DissipationSpec::coherent(), g, &EvolveOptions { sampling: 0, ..Default::default() }).unwrap();
    let q1 = 1.0 - 0.05f64.powi(2) * 8.0 / 16.0;
    assert!((tr.trace.q_cl / tr.trace.q_a - q1).abs() < 1e-3);
    assert!(tr.trace.q_a > 0.999);
}

#[test]
fn fast_ground_relaxation_tracks_the_ground_state() {
    let n = net("maj-101");
    let g = 1e-2;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
    let spec = DissipationSpec::new(Relaxation::Ground, 10.0 * g).unwrap();
    let tr = LvnModel::new(&n).unwrap().evolve(&sched, &spec, g, &EvolveOptions { sampling: 0, ..Default::default() }).unwrap();
    assert!(tr.trace.q_l > 0.99, "{}", tr.trace.q_l);
    assert!(tr.final_state.min_eigenvalue().unwrap() > -1e-8);
}

#[test]
fn sampling_covers_the_clock() {
    let n = net("wire-3");
    let g = 5e-2;
    let sched = ScheduleSpec::new(ScheduleKind::Linear).for_runrate::<f64>(g).unwrap();
    let tr = LvnModel::new(&n)
        .unwrap()
        .evolve(&sched, &DissipationSpec::coherent(), g, &EvolveOptions { sampling: 11, record_cells: true, ..Default::default() })
        .unwrap();
    assert_eq!(tr.trace.samples.len(), 11);
    assert_eq!(tr.cells.len(), 11);
    assert_eq!(tr.trace.samples[10].0, 1.0);
    assert!((tr.trace.samples[10].1 - tr.trace.q_a).abs() < 1e-9);
    assert!(tr.cells.iter().all(|(_, c)| c.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-9)));
}
