//! `conelab`: build cone nets, run perturbation certificates, harmonic
//! replacement, curve straightening and density decay computations.
//!
//! Exit codes: 0 success or PASS, 2 a checked inequality fails, 1 usage or
//! I/O error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "conelab", version, about = "Minimal cone laboratory")]
struct Cli {
    /// `key = value` file supplying defaults for unset flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit reports as JSON instead of `key = value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeKind {
    Plane,
    #[value(alias = "Y")]
    Y,
    #[value(alias = "T")]
    T,
    Union,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NetFormat {
    Json,
    Obj,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a cone net and write its JSON (or OBJ) form.
    Build(BuildArgs),
    /// Sample perturbations and estimate the full-length constant.
    FullLength(FullLengthArgs),
    /// Harmonic replacement of a sector profile and its area saving.
    Epi(EpiArgs),
    /// Straighten a near-geodesic curve.
    Straighten(StraightenArgs),
    /// Decay estimates for the density excess.
    #[command(subcommand)]
    Decay(DecayCommand),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub kind: ConeKind,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub eta0: Option<f64>,
    /// Net files joined by `union`, each placed in its own block of coordinates.
    #[arg(long, num_args = 1..)]
    pub parts: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: NetFormat,
    /// Cut radius of the OBJ mesh.
    #[arg(long, default_value_t = 1.0)]
    pub obj_radius: f64,
    /// Arc subdivision step of the OBJ mesh, in radians.
    #[arg(long, default_value_t = 0.02)]
    pub obj_step: f64,
}

#[derive(Debug, Args)]
pub struct FullLengthArgs {
    pub net: PathBuf,
    #[arg(long)]
    pub eta1: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV of all samples, ordered by sample id.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// JSON summary file.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Certify each connected component separately.
    #[arg(long)]
    pub componentwise: bool,
}

#[derive(Debug, Args)]
pub struct EpiArgs {
    /// Profile file (`.json`, otherwise CSV `t,v1,…`).
    pub profile: Option<PathBuf>,
    /// Lipschitz bound for CSV profiles; measured when absent.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub modes: Option<usize>,
    /// Run this many seeded random profiles instead of a file.
    #[arg(long)]
    pub battery: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Codimension of battery profiles.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Grid intervals of battery profiles.
    #[arg(long)]
    pub intervals: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StraightenArgs {
    /// Curve file (`.json` with optional plane, otherwise CSV points).
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Closeness parameter τ₁; defaults to 1e-4·η² for files and 1e-3 for batteries.
    #[arg(long)]
    pub tau1: Option<f64>,
    /// Write the straightened curve here (CSV, or JSON for `.json`).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Write the straightened curve as a sector profile CSV on this many intervals.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub profile_intervals: usize,
    /// Run this many seeded random admissible curves instead of a file.
    #[arg(long)]
    pub battery: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum DecayCommand {
    /// Power-gauge decay bound.
    Bound(BoundArgs),
    /// Explicit log-gauge decay bound.
    LogBound(LogBoundArgs),
    /// Envelope for the weak differential inequality.
    WeakEnvelope(WeakEnvelopeArgs),
    /// Near-monotonicity check of a density profile CSV (`r,theta`).
    CheckMonotone(CheckMonotoneArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub fy: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long = "C0", default_value_t = 0.0)]
    pub c0: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
}

#[derive(Debug, Args)]
pub struct LogBoundArgs {
    #[arg(long)]
    pub fy: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long = "C")]
    pub c: f64,
    #[arg(long = "A")]
    pub scale: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
}

#[derive(Debug, Args)]
pub struct WeakEnvelopeArgs {
    #[arg(long)]
    pub fy: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "N")]
    pub exponent: f64,
    #[arg(long)]
    pub y: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long = "Ch", default_value_t = 0.0)]
    pub c_h: f64,
}

#[derive(Debug, Args)]
pub struct CheckMonotoneArgs {
    pub profile: PathBuf,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Limit density; defaults to θ at the smallest radius.
    #[arg(long)]
    pub d0: Option<f64>,
    /// Constant of the excess bounds; they are skipped when absent.
    #[arg(long = "C")]
    pub excess_constant: Option<f64>,
    /// Power gauge coefficient.
    #[arg(long = "C0", conflicts_with = "log_c")]
    pub c0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Log gauge `c·[log(A/r)]^{-b}`: coefficient.
    #[arg(long = "log-C", requires = "log_a")]
    pub log_c: Option<f64>,
    #[arg(long = "log-A")]
    pub log_a: Option<f64>,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = match &cli.config {
        Some(path) => config::RunConfig::load(path)?,
        None => config::RunConfig::default(),
    };
    commands::configure_threads(&cfg)?;
    let ctx = commands::Context { cfg, json: cli.json };
    match cli.command {
        Command::Build(a) => commands::build(&ctx, &a),
        Command::FullLength(a) => commands::full_length(&ctx, &a),
        Command::Epi(a) => commands::epi(&ctx, &a),
        Command::Straighten(a) => commands::straighten(&ctx, &a),
        Command::Decay(d) => commands::decay(&ctx, &d),
    }
}
