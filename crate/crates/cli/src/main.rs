use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hus_core::HusError;

mod commands;

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_HYPERBOLIC: u8 = 3;
const EXIT_INFINITY: u8 = 4;
const EXIT_GATE: u8 = 5;
const EXIT_VERIFY: u8 = 6;

/// Stability toolkit for perturbed orbits of hyperbolic Möbius maps.
#[derive(Debug, Parser)]
#[command(name = "moebius-hus", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct MapSource {
    /// JSON map file `{"a":[re,im],"b":..,"c":..,"d":..}`.
    #[arg(long, conflicts_with = "preset")]
    map: Option<std::path::PathBuf>,
    /// `golden`, `pielou` or `pielou:A,C`.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    None,
    Uniform,
    Boundary,
    Outward,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Regime {
    /// Contraction bound when `z0` lies in `S(1 + t)`, combined bound otherwise.
    Auto,
    Contraction,
    Combined,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a map and print its hyperbolic profile.
    Classify {
        #[command(flatten)]
        src: MapSource,
    },
    /// Export every region as JSON.
    Regions {
        #[command(flatten)]
        src: MapSource,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Simulate a perturbed orbit with its shadow and bounds (JSON lines).
    Orbit {
        #[command(flatten)]
        src: MapSource,
        /// Start point: `re,im`, `re` or `inf`.
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Model::Boundary)]
        model: Model,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Confinement parameter `t` (default: the trace surplus τ).
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum, default_value_t = Regime::Auto)]
        regime: Regime,
        /// Run this many seeds starting at `--seed`.
        #[arg(long)]
        batch: Option<u64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Print the stability constants.
    Bounds {
        #[command(flatten)]
        src: MapSource,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        src: MapSource,
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<HusError>() {
        Some(HusError::NotHyperbolic | HusError::LinearMap) => EXIT_NOT_HYPERBOLIC,
        Some(HusError::DeltaTooLarge { .. } | HusError::HypothesisViolated(_)) => EXIT_GATE,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
