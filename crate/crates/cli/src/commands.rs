use anyhow::{anyhow, bail, Result};
use serde_json::json;

use qca_clocking::analysis::{
    alpha1_bound, beta_star, incorrect_excited_census, mean_field_crossing, quality_params, relaxed_crossing,
};
use qca_clocking::icha::{dominant_frequency, DissipationVectorSpec, EtaKind, IchaModel, IchaOptions};
use qca_clocking::lvn::{parse_args, DissipationSpec, EvolveOptions, LvnModel, Relaxation};
use qca_clocking::network::{build_device, classical_ground, QcaNetwork};
use qca_clocking::quantum::{fit_min_gap, spectrum_sweep};
use qca_clocking::sweep::output::{Cell, Table};
use qca_clocking::sweep::{self, Engine, SweepConfig};
use qca_clocking::analysis::rabi_frequency;

use crate::emit::{emit, emit_json};
use crate::{version_tag, AnalyzeArgs, EvolveArgs, ScalingArgs, SpectrumArgs, SweepArgs};

fn network(name: &str) -> Result<QcaNetwork<f64>> {
    Ok(build_device(&name.parse()?)?)
}

pub fn sweep_freq(a: &SweepArgs) -> Result<()> {
    let cfg = a.config(false)?;
    let res = sweep::frequency_sweep(&cfg)?;
    let summary = json!({ "meta": version_tag(), "gamma_max": res.runs.iter().map(|r| json!({
        "dissipation": r.dissipation, "delta": r.delta, "gamma_max": r.gamma_max })).collect::<Vec<_>>() });
    emit(&a.common, res.points_table().to_csv(), serde_json::to_value(&res)?, Some(summary))
}

pub fn map2d(a: &SweepArgs) -> Result<()> {
    let cfg = a.config(true)?;
    let res = sweep::map_2d(&cfg)?;
    emit(&a.common, res.table().to_csv(), serde_json::to_value(&res)?, None)
}

pub fn contour(a: &SweepArgs) -> Result<()> {
    let cfg = a.config(true)?;
    let res = sweep::contour_track(&cfg)?;
    let lost: Vec<_> = res.runs.iter().map(|r| json!({ "dissipation": r.dissipation, "lost_after": r.lost_after })).collect();
    emit(&a.common, res.table().to_csv(), serde_json::to_value(&res)?, Some(json!({ "meta": version_tag(), "runs": lost })))
}

pub fn wire_scaling(a: &ScalingArgs) -> Result<()> {
    let mut cfg = SweepConfig::new("wire-1");
    cfg.engine = a.common.engine;
    cfg.schedule = a.common.schedule_spec();
    cfg.gamma = sweep::LogGrid::new(a.gamma_min, a.gamma_max, a.gamma_points)?;
    cfg.metric = a.metric;
    cfg.threshold = a.threshold;
    let res = sweep::wire_scaling_run(&a.lengths, &a.schedules, &cfg)?;
    let summary: Vec<_> = res
        .rows
        .iter()
        .map(|r| json!({ "schedule": r.schedule, "nu": r.fit.as_ref().map(|f| f.nu),
            "nu_2sigma": r.fit.as_ref().map(|f| 2.0 * f.std_error), "nu1": r.nu1, "fit_error": r.fit_error }))
        .collect();
    emit(&a.common, res.table().to_csv(), serde_json::to_value(&res)?, Some(json!({ "meta": version_tag(), "fits": summary })))
}

pub fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let c = &a.common;
    let net = network(&c.device)?;
    let ground = classical_ground(&net)?;
    let q = quality_params(&net, &ground)?;
    let census = incorrect_excited_census(&net, &ground)?;
    let sched = c.schedule_spec().unsmoothed::<f64>()?;
    let report = json!({
        "meta": version_tag(),
        "device": net.name(),
        "cells": net.n_cells(),
        "schedule": c.schedule_spec(),
        "f0": q.f0,
        "f1": q.f1,
        "q0": q.q0(c.alpha0),
        "q1": q.q1(c.alpha1),
        "alpha1_bound": alpha1_bound(q.f1, a.target),
        "target": a.target,
        "delta1": census.delta1,
        "d1": census.d1,
        "beta_star": beta_star(census.delta1, census.d1, a.target),
        "relaxed_crossing": relaxed_crossing(&net, &sched, a.target)?,
        "mean_field_crossing": mean_field_crossing(&net, &sched, a.target)?,
    });
    emit_json(c, report)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<()> {
    let c = &a.common;
    let net = network(&c.device)?;
    let sched = c.schedule_spec().unsmoothed::<f64>()?;
    let dim = 1usize << net.n_cells();
    let levels = a.levels.min(dim);
    let sweep = spectrum_sweep(&net, &sched, a.grid, levels)?;
    // a failed fit still leaves a useful spectrum
    let (fit, fit_error) = match fit_min_gap(&sweep, a.window) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut header = vec!["s".to_string()];
    header.extend((0..levels).map(|k| format!("e{k}")));
    header.push("gap".into());
    header.extend((1..levels).map(|k| format!("e{k}_minus_e0")));
    let mut t = Table { header, rows: Vec::new() };
    for sl in &sweep.slices {
        let mut row: Vec<Cell> = vec![sl.s.into()];
        row.extend(sl.eigenvalues.iter().map(|&e| Cell::Num(e)));
        row.push(sl.gap.into());
        row.extend(sl.eigenvalues.iter().skip(1).map(|&e| Cell::Num(e - sl.eigenvalues[0])));
        t.push(row);
    }
    let min = sweep.min_gap();
    let summary = json!({ "meta": version_tag(), "device": net.name(), "schedule": c.schedule_spec(),
        "grid_min": { "s": min.s, "gap": min.gap }, "fit": fit, "fit_error": fit_error });
    let full = json!({ "summary": summary, "slices": sweep.slices.iter().map(|s| json!({
        "s": s.s, "eigenvalues": s.eigenvalues, "gap": s.gap, "ground_degeneracy": s.ground_degeneracy })).collect::<Vec<_>>() });
    emit(c, t.to_csv(), full, Some(summary))
}

/// `kind[:k=v,...]` with an optional `rate=` entry.
fn parse_dissipation(text: &str) -> Result<(EtaKind<f64>, f64)> {
    let kind: EtaKind<f64> = text.parse()?;
    let args = text.split_once(':').map_or("", |(_, a)| a);
    let rate = parse_args(args)?.into_iter().find(|(k, _)| k == "rate").map(|(_, v)| v);
    match (kind, rate) {
        (EtaKind::None, None) => Ok((kind, 0.0)),
        (EtaKind::None, Some(_)) => bail!("a coherent run takes no rate"),
        (_, Some(r)) => Ok((kind, r)),
        (_, None) => bail!("dissipation `{text}` needs rate=<δ>"),
    }
}

fn cell_header(net: &QcaNetwork<f64>, prefix: &str, t: &mut Vec<String>) {
    for l in net.labels() {
        for ax in ["x", "y", "z"] {
            t.push(format!("{prefix}{ax}_{l}"));
        }
    }
}

pub fn evolve(a: &EvolveArgs) -> Result<()> {
    let c = &a.common;
    let net = network(&c.device)?;
    let sched = c.schedule_spec().for_runrate::<f64>(a.runrate)?;
    let (kind, rate) = parse_dissipation(&a.dissipation)?;
    match c.engine {
        Engine::Dense => {
            let relax = match kind {
                EtaKind::None => Relaxation::None,
                EtaKind::Spectral(r) => r,
                EtaKind::MeanField { .. } => bail!("mean-field dissipation needs --engine icha"),
            };
            let spec = if relax == Relaxation::None { DissipationSpec::coherent() } else { DissipationSpec::new(relax, rate)? };
            let model = LvnModel::new(&net)?;
            let opts = EvolveOptions { rtol: a.rtol, atol: a.atol, sampling: a.sampling, record_cells: true, force_density: a.force_density };
            let tr = model.evolve(&sched, &spec, a.runrate, &opts)?;
            let mut header = vec!["s".to_string(), "q_a".to_string()];
            cell_header(&net, "sigma", &mut header);
            let mut t = Table { header, rows: Vec::new() };
            for ((s, qa), (_, cells)) in tr.trace.samples.iter().zip(&tr.cells) {
                let mut row: Vec<Cell> = vec![(*s).into(), (*qa).into()];
                row.extend(cells.iter().flat_map(|v| v.iter().map(|&x| Cell::Num(x))));
                t.push(row);
            }
            let summary = json!({
                "meta": version_tag(), "engine": "dense", "device": net.name(), "runrate": a.runrate,
                "dissipation": a.dissipation, "schedule": c.schedule_spec(), "sigma": sched.sigma(),
                "q_a": tr.trace.q_a, "q_cl": tr.trace.q_cl, "q_l": tr.trace.q_l,
                "pure_state": tr.pure, "initial_residual": tr.initial_residual, "initial_fallback": tr.initial_fallback,
                "steps": { "accepted": tr.stats.accepted, "rejected": tr.stats.rejected, "evaluations": tr.stats.evaluations },
            });
            let full = json!({ "summary": summary, "samples": tr.trace.samples, "cells": tr.cells });
            emit(c, t.to_csv(), full, Some(summary))
        }
        Engine::Icha => {
            let spec = if kind == EtaKind::None { DissipationVectorSpec::coherent() } else { DissipationVectorSpec::new(kind, rate)? };
            let model = IchaModel::new(&net)?;
            let opts = IchaOptions { step: a.step, sampling: a.sampling, record_steps: true };
            let tr = model.evolve(&sched, &spec, a.runrate, &opts)?;
            let probe = match &a.probe {
                Some(l) => net.labels().iter().position(|x| x == l).ok_or_else(|| anyhow!("no cell `{l}`"))?,
                None => net.outputs()[0],
            };
            let freq = dominant_frequency(&tr.lambda_y_series(probe), 0.2).ok();
            let z = tr.final_state.lambdas[probe][2];
            let mut header = vec!["s".to_string()];
            cell_header(&net, "lambda", &mut header);
            let mut t = Table { header, rows: Vec::new() };
            for st in &tr.samples {
                let mut row: Vec<Cell> = vec![st.s.into()];
                row.extend(st.lambdas.iter().flat_map(|v| v.iter().map(|&x| Cell::Num(x))));
                t.push(row);
            }
            let summary = json!({
                "meta": version_tag(), "engine": "icha", "device": net.name(), "runrate": a.runrate,
                "dissipation": a.dissipation, "schedule": c.schedule_spec(), "sigma": sched.sigma(),
                "q_cl": tr.q_cl, "q_l": tr.q_l,
                "initial_residual": tr.initial_residual, "initial_fallback": tr.initial_fallback,
                "steps": tr.stats.steps, "newton_iterations": tr.stats.newton_iterations, "halvings": tr.stats.halvings,
                "final_lambda": tr.final_state.lambdas,
                "probe": { "cell": net.labels()[probe], "oscillation_frequency": freq,
                    "predicted_frequency": rabi_frequency(z, c.alpha1, a.runrate) },
            });
            let full = json!({ "summary": summary, "samples": tr.samples.iter().map(|s| json!({ "s": s.s, "lambda": s.lambdas })).collect::<Vec<_>>() });
            emit(c, t.to_csv(), full, Some(summary))
        }
    }
}

pub fn device_show(name: &str) -> Result<()> {
    let net = network(name)?;
    let mut header = vec!["cell".to_string(), "h".to_string()];
    header.extend(net.labels().iter().cloned());
    let mut t = Table { header, rows: Vec::new() };
    for (i, l) in net.labels().iter().enumerate() {
        let mut row: Vec<Cell> = vec![l.clone().into(), net.bias()[i].into()];
        row.extend((0..net.n_cells()).map(|j| Cell::Num(net.kink()[(i, j)])));
        t.push(row);
    }
    print!("{}", t.to_csv());
    Ok(())
}
