//! `deepmp`: dictionary generation, mixture datasets, DeepMP training and the
//! evaluation sweep.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deepmp_core::Error;

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "deepmp", version, about = "Non-negative sparse decomposition with NNMP, NNOMP and DeepMP")]
struct Cli {
    /// TOML run configuration; omitted keys take the full-scale defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies training and test sample counts.
    #[arg(long, global = true)]
    scale: Option<f64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the dictionary (synthetic, Raman library or Raman-like surrogate).
    GenDict,
    /// Write training and validation mixtures for every k.
    GenData,
    /// Train one DeepMP model per k.
    Train,
    /// Evaluate NNMP, NNOMP and DeepMP on held-out mixtures.
    Eval,
    /// Coherence ECDFs of the dictionary, trained models and extra matrices.
    Ecdf {
        /// Additional matrices in dictionary CSV layout.
        matrices: Vec<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(scale) = cli.scale {
        cfg.scale = scale;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::GenDict => commands::gen_dict(&cfg),
        Command::GenData => commands::gen_data(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Eval => commands::eval(&cfg),
        Command::Ecdf { matrices } => commands::ecdf(&cfg, matrices),
    }
}

/// 1 for numerical failures, 2 for anything caused by the inputs.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::NonFiniteLoss { .. } | Error::NonFiniteGradient | Error::MaxIterationsExceeded(_) | Error::DegenerateColumn { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
