use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qca_clocking::sweep::{Engine, LogGrid, Metric, SweepConfig};
use qca_clocking::schedule::{ScheduleKind, ScheduleSpec, Smoothing};

mod commands;
mod emit;

#[derive(Parser)]
#[command(name = "qcaclock", version, about = "Adiabatic clocking of QCA networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Final metrics over a Γ grid and the threshold rate Γ_max.
    SweepFreq(SweepArgs),
    /// Metrics over the (Γ, δ) grid.
    Map2d(SweepArgs),
    /// Threshold contour Γ_max(δ).
    Contour(SweepArgs),
    /// Γ_max of Wire-N against N and the fitted rate constant ν.
    WireScaling(ScalingArgs),
    /// Closed-form quality factors and relaxed-limit thresholds.
    Analyze(AnalyzeArgs),
    /// Low-lying spectrum along the schedule and the minimum-gap fit.
    Spectrum(SpectrumArgs),
    /// A single clocked run.
    Evolve(EvolveArgs),
    /// Device library.
    Device {
        #[command(subcommand)]
        action: DeviceAction,
    },
}

#[derive(Subcommand)]
enum DeviceAction {
    /// Kink matrix and bias vector as CSV.
    Show { name: String },
    /// The device as a JSON device file.
    Export { name: String },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "wire-5")]
    device: String,
    #[arg(long, default_value = "dense")]
    engine: Engine,
    #[arg(long, default_value = "quasi")]
    schedule: ScheduleKind,
    #[arg(long, default_value_t = 5.0)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha1: f64,
    /// auto, off, or a fixed σ.
    #[arg(long, default_value = "auto")]
    smoothing: Smoothing,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Where the JSON summary of a CSV run goes (default: next to --out, else stderr).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn schedule_spec(&self) -> ScheduleSpec {
        ScheduleSpec { kind: self.schedule, alpha0: self.alpha0, alpha1: self.alpha1, smoothing: self.smoothing }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// JSON sweep configuration; flags below are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "none")]
    dissipation: String,
    /// Comma-separated β values replacing the dissipation's β.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Fixed δ for frequency sweeps.
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    gamma_min: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_max: f64,
    #[arg(long, default_value_t = 61)]
    gamma_points: usize,
    #[arg(long, default_value_t = 1e-5)]
    delta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    delta_max: f64,
    #[arg(long, default_value_t = 41)]
    delta_points: usize,
    #[arg(long, default_value = "q_l")]
    metric: Metric,
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
}

impl SweepArgs {
    fn config(&self, with_delta: bool) -> Result<SweepConfig> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut cfg = SweepConfig::from_json(&text)?;
            if with_delta && cfg.delta.is_none() {
                cfg.delta = Some(LogGrid::default_delta());
            }
            return Ok(cfg);
        }
        let c = &self.common;
        let mut cfg = SweepConfig::new(c.device.clone());
        cfg.engine = c.engine;
        cfg.schedule = c.schedule_spec();
        cfg.dissipation = self.dissipation.clone();
        cfg.betas = self.betas.clone();
        cfg.rate = self.rate;
        cfg.gamma = LogGrid::new(self.gamma_min, self.gamma_max, self.gamma_points)?;
        if with_delta {
            cfg.delta = Some(LogGrid::new(self.delta_min, self.delta_max, self.delta_points)?);
        }
        cfg.metric = self.metric;
        cfg.threshold = self.threshold;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
    lengths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "linear,quasi,sinus")]
    schedules: Vec<ScheduleKind>,
    #[arg(long, default_value_t = 1e-3)]
    gamma_min: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma_max: f64,
    #[arg(long, default_value_t = 31)]
    gamma_points: usize,
    #[arg(long, default_value = "q_cl")]
    metric: Metric,
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.99)]
    target: f64,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = 401)]
    grid: usize,
    /// Half-width in s of the hyperbola fit window.
    #[arg(long, default_value_t = qca_clocking::quantum::DEFAULT_FIT_WINDOW)]
    window: f64,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    runrate: f64,
    /// none | ground | classical | boltzmann:beta=..,rate=.. | meanfield:beta=..,rate=..
    #[arg(long, default_value = "none")]
    dissipation: String,
    #[arg(long, default_value_t = 501)]
    sampling: usize,
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    /// Implicit-Euler step of the icha engine (default min(1e-3, Γ/10)).
    #[arg(long)]
    step: Option<f64>,
    /// Cell whose λ_y oscillation the icha summary reports (default: first output).
    #[arg(long)]
    probe: Option<String>,
    /// Propagate ρ even when a wavefunction would do.
    #[arg(long)]
    force_density: bool,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::SweepFreq(a) | Command::Map2d(a) | Command::Contour(a) => a.common.threads,
        Command::WireScaling(a) => a.common.threads,
        Command::Analyze(a) => a.common.threads,
        Command::Spectrum(a) => a.common.threads,
        Command::Evolve(a) => a.common.threads,
        Command::Device { .. } => None,
    };
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    qca_clocking::sweep::with_threads(threads, || run(cli.command))?
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::SweepFreq(a) => commands::sweep_freq(&a),
        Command::Map2d(a) => commands::map2d(&a),
        Command::Contour(a) => commands::contour(&a),
        Command::WireScaling(a) => commands::wire_scaling(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Device { action: DeviceAction::Show { name } } => commands::device_show(&name),
        Command::Device { action: DeviceAction::Export { name } } => {
            let file = qca_clocking::network::device_file(&name.parse()?)?;
            println!("{}", file.to_json());
            Ok(())
        }
    }
}

fn version_tag() -> serde_json::Value {
    json!({ "tool": "qcaclock", "version": env!("CARGO_PKG_VERSION") })
}
