use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use qca_clocking::icha::{
    dominant_frequency, evolve_icha, gamma_vectors, icha_rhs, mean_field_fixed_point, CoherenceState,
    DissipationVectorSpec, EtaKind, IchaModel, IchaOptions,
};
use qca_clocking::lvn::{DissipationSpec, EvolveOptions, LvnModel};
use qca_clocking::network::{build_device, classical_ground, QcaNetwork};
use qca_clocking::schedule::{Drive, Frozen, ScheduleKind, ScheduleSpec};

fn net(name: &str) -> QcaNetwork<f64> {
    build_device(&name.parse().unwrap()).unwrap()
}

fn random_network() -> impl Strategy<Value = QcaNetwork<f64>> {
    (2usize..7).prop_flat_map(|n| {
        (prop::collection::vec(-1.0f64..1.0, n * (n - 1) / 2), prop::collection::vec(-1.0f64..1.0, n)).prop_map(move |(e, h)| {
            let mut k = DMatrix::zeros(n, n);
            let mut it = e.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().unwrap();
                    k[(i, j)] = v;
                    k[(j, i)] = v;
                }
            }
            QcaNetwork::from_parts(k, DVector::from_vec(h), vec![0]).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aligned_vectors_are_stationary(
        net in random_network(), z in prop::collection::vec(-1.0f64..1.0, 6), scale in prop::collection::vec(-1.0f64..1.0, 6),
        a in 0.01f64..5.0, b in 0.1f64..2.0
    ) {
        let n = net.n_cells();
        // fix λ_z first, then point each λ along its Γ with the same z so Γ is unchanged
        let mut lam: Vec<[f64; 3]> = (0..n).map(|i| [0.0, 0.0, z[i]]).collect();
        let g = gamma_vectors(&net, &lam, a, b);
        for i in 0..n {
            let gi = g[i];
            let t = if gi[2].abs() > 1e-9 { z[i] / gi[2] } else { scale[i] };
            lam[i] = [t * gi[0], 0.0, t * gi[2]];
            if gi[2].abs() <= 1e-9 {
                lam[i][2] = z[i];
            }
        }
        // only keep cells whose vector really is parallel to Γ
        let g = gamma_vectors(&net, &lam, a, b);
        let parallel = (0..n).all(|i| (g[i][0] * lam[i][2] - g[i][2] * lam[i][0]).abs() < 1e-12);
        prop_assume!(parallel);
        let st = CoherenceState { lambdas: lam, s: 0.3 };
        let d = icha_rhs(&st, &net, a, b, &DissipationVectorSpec::coherent(), 0.01).unwrap();
        for v in d {
            for x in v {
                // derivative carries 1/Γ = 100
                prop_assert!(x.abs() <= 1e-12 * 100.0 * (1.0 + a + b), "{}", x);
            }
        }
    }

    #[test]
    fn precession_conserves_length_and_obeys_component_couplings(
        net in random_network(), raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 6),
        a in 0.01f64..5.0, b in 0.1f64..2.0, runrate in 1e-3f64..0.1
    ) {
        let n = net.n_cells();
        let lam: Vec<[f64; 3]> = raw.iter().take(n).map(|&(x, y, z)| [x, y, z]).collect();
        let st = CoherenceState { lambdas: lam.clone(), s: 0.5 };
        let d = icha_rhs(&st, &net, a, b, &DissipationVectorSpec::coherent(), runrate).unwrap();
        let g = gamma_vectors(&net, &lam, a, b);
        for i in 0..n {
            let dot: f64 = (0..3).map(|k| lam[i][k] * d[i][k]).sum();
            prop_assert!(dot.abs() < 1e-9 / runrate);
            // Γ_i = (−γ, 0, h̃): dλ_x = −h̃λ_y/Γ, dλ_z = −γλ_y/Γ
            let (gamma, h) = (-g[i][0], g[i][2]);
            prop_assert!((d[i][0] + h * lam[i][1] / runrate).abs() < 1e-6);
            prop_assert!((d[i][2] + gamma * lam[i][1] / runrate).abs() < 1e-6);
        }
    }
}

#[test]
fn derivative_couplings_against_finite_differences() {
    // integrate briefly and compare dλ/ds from finite differences with the law
    let n = net("wire-5");
    let drive = Frozen { a: 0.05, b: 1.0 };
    let model = IchaModel::new(&n).unwrap();
    let init = model.initial_state(&Frozen { a: 0.3, b: 1.0 }, &DissipationVectorSpec::coherent()).unwrap();
    let g = 0.5;
    let st = init.state.clone();
    let d = icha_rhs(&st, &n, drive.a, drive.b, &DissipationVectorSpec::coherent(), g).unwrap();
    // central difference of a tiny exact rotation step through the RHS itself
    let h = 1e-6;
    let step = |sign: f64| -> Vec<[f64; 3]> {
        st.lambdas.iter().zip(&d).map(|(l, dl)| [l[0] + sign * h * dl[0], l[1] + sign * h * dl[1], l[2] + sign * h * dl[2]]).collect()
    };
    let (p, m) = (step(1.0), step(-1.0));
    let gam = gamma_vectors(&n, &st.lambdas, drive.a, drive.b);
    for i in 0..n.n_cells() {
        let fx = (p[i][0] - m[i][0]) / (2.0 * h);
        let fz = (p[i][2] - m[i][2]) / (2.0 * h);
        assert!((fx + gam[i][2] * st.lambdas[i][1] / g).abs() < 1e-6);
        assert!((fz - gam[i][0] * st.lambdas[i][1] / g).abs() < 1e-6);
    }
}

/// Starts the wire in its s = 0 state, then freezes the end-of-clock
/// Hamiltonian with the neighbours of the probe cell already settled.
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
fn single_cell_oscillation_law() {
    // one driven cell: Γ = (−γ, 0, h) is constant, so λ precesses at |Γ|/(2πΓ_rate)
    let n = net("wire-1");
    let g = 2e-2;
    let drive = Quench { before: (5.0, 1.0), after: (0.05, 1.0) };
    let tr = evolve_icha(&n, &drive, &DissipationVectorSpec::coherent(), g, &IchaOptions { step: Some(5e-5), sampling: 0, record_steps: true })
        .unwrap();
    let f = dominant_frequency(&tr.lambda_y_series(0), 0.2).unwrap();
    let gam = gamma_vectors(&n, &tr.final_state.lambdas, 0.05, 1.0)[0];
    let want = (gam[0] * gam[0] + gam[2] * gam[2]).sqrt() / (std::f64::consts::TAU * g);
    assert!((f / want - 1.0).abs() < 0.02, "{f} vs {want}");
}

#[test]
fn trajectories_stay_inside_the_bloch_ball() {
    let n = net("maj-101");
    let g = 2e-2;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
    let tr = evolve_icha(&n, &sched, &DissipationVectorSpec::coherent(), g, &IchaOptions { sampling: 0, record_steps: true, ..Default::default() }).unwrap();
    assert!(tr.steps.iter().all(|s| s.max_norm() <= 1.0 + 1e-6));
}

#[test]
fn adiabatic_limit_and_engine_agreement() {
    let n = net("wire-5");
    let slow = 1e-4;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(slow).unwrap();
    let tr = evolve_icha(&n, &sched, &DissipationVectorSpec::coherent(), slow, &IchaOptions { sampling: 0, ..Default::default() }).unwrap();
    assert!(tr.q_l >= 0.998, "{}", tr.q_l);

    let g = 1e-3;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
    let icha = evolve_icha(&n, &sched, &DissipationVectorSpec::coherent(), g, &IchaOptions { sampling: 0, ..Default::default() }).unwrap();
    let dense = LvnModel::new(&n).unwrap().evolve(&sched, &DissipationSpec::coherent(), g, &EvolveOptions { sampling: 0, ..Default::default() }).unwrap();
    assert!((icha.q_l - dense.trace.q_l).abs() < 5e-3, "{} {}", icha.q_l, dense.trace.q_l);
}

#[test]
fn asymmetric_majority_differs_from_exact_dynamics() {
    let n = net("maj-101");
    let icha = IchaModel::new(&n).unwrap();
    let lvn = LvnModel::new(&n).unwrap();
    let worst = [0.01, 0.02, 0.04, 0.08]
        .iter()
        .map(|&g| {
            let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
            let a = icha.evolve(&sched, &DissipationVectorSpec::coherent(), g, &IchaOptions { sampling: 0, ..Default::default() }).unwrap();
            let b = lvn.evolve(&sched, &DissipationSpec::coherent(), g, &EvolveOptions { sampling: 0, ..Default::default() }).unwrap();
            (a.q_l - b.trace.q_l).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}

#[test]
fn mean_field_relaxation_reaches_its_fixed_point() {
    // with δ ≫ Γ the final λ_z sits at the mean-field fixed point of H(1)
    let n = net("wire-3");
    let g = 1e-2;
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).for_runrate::<f64>(g).unwrap();
    let spec = DissipationVectorSpec::new(EtaKind::MeanField { beta: 3.0 }, 1.0).unwrap();
    let tr = evolve_icha(&n, &sched, &spec, g, &IchaOptions { sampling: 0, ..Default::default() }).unwrap();
    let fp = mean_field_fixed_point(&n, 3.0, &sched).unwrap();
    for (l, z) in tr.final_state.lambdas.iter().zip(&fp.eta_z) {
        assert!((l[2] - z).abs() < 2e-2, "{} {}", l[2], z);
    }
    let ground = classical_ground(&n).unwrap();
    assert!(tr.q_l > 0.5 && ground.polarization(2) * fp.eta_z[2] > 0.0);
}

#[test]
fn fixed_point_saturates_to_classical() {
    let n = net("wire-3");
    let sched = ScheduleSpec::new(ScheduleKind::QuasiLinear).unsmoothed::<f64>().unwrap();
    let fp = mean_field_fixed_point(&n, 1e6, &sched).unwrap();
    let g = classical_ground(&n).unwrap();
    // tanh saturates; η is then −Γ̂, whose z component is the classical polarization up to the α1 tilt
    for (i, z) in fp.eta_z.iter().enumerate() {
        let (a, _) = sched.evaluate(1.0).unwrap();
        assert!((z - g.polarization(i)).abs() <= a * a, "{z}");
    }
}
