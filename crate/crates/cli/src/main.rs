//! `conewave`: simulate wave data, inspect the line operator and its
//! kernels, and reconstruct fields from Cauchy data.
//!
//! Exit status: 0 on success, 1 for invalid configuration or parameters,
//! 2 for missing or unreadable input, 3 for numerical failures (including
//! a failed self-test).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Config, ConfigError};

#[derive(Debug, Parser)]
#[command(
    name = "conewave",
    version,
    about = "Continuation of wave fields from Cauchy data on a line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file with `key = value` lines.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "CONEWAVE_OUT", default_value = "conewave-out")]
    out: PathBuf,
    /// Worker threads (0 picks one per core).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Relative amplitude of uniform noise added to the data.
    #[arg(long)]
    noise: Option<f64>,
    /// Noise generator seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the forward solver and write Cauchy data and ground truth.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Bound states, scattering coefficients and a Parseval check.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the regularized kernels around one target.
    Kernel {
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct the field at the configured targets.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Directory holding f.csv, g.csv and meta.csv.
        #[arg(long)]
        data: Option<PathBuf>,
        /// spectral, localized or both.
        #[arg(long)]
        pipeline: Option<String>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        h_ratio: Option<f64>,
        #[arg(long)]
        h_count: Option<usize>,
        /// Window margin of the localized pipeline.
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Run the acceptance suite.
    Selftest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
    },
}

fn set_opt<T: ToString>(cfg: &mut Config, key: &str, value: Option<T>) -> Result<()> {
    match value {
        Some(v) => cfg.set(key, v),
        None => Ok(()),
    }
}

fn load(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    set_opt(&mut cfg, "run.workers", common.workers)?;
    Ok(cfg)
}

fn set_noise(cfg: &mut Config, noise: &NoiseArgs) -> Result<()> {
    set_opt(cfg, "noise.amplitude", noise.noise)?;
    set_opt(cfg, "noise.seed", noise.seed)
}

fn run(cli: Cli) -> Result<bool> {
    let (name, common) = match &cli.command {
        Command::Simulate { common } => ("simulate", common),
        Command::Spectrum { common } => ("spectrum", common),
        Command::Kernel { common } => ("kernel", common),
        Command::Reconstruct { common, .. } => ("reconstruct", common),
        Command::Selftest { common, .. } => ("selftest", common),
    };
    let out_dir = common.out.clone();
    let mut cfg = load(common)?;
    match &cli.command {
        Command::Reconstruct {
            pipeline,
            h0,
            h_ratio,
            h_count,
            epsilon,
            noise,
            ..
        } => {
            set_opt(&mut cfg, "reconstruct.pipeline", pipeline.as_ref())?;
            set_opt(&mut cfg, "schedule.h0", *h0)?;
            set_opt(&mut cfg, "schedule.ratio", *h_ratio)?;
            set_opt(&mut cfg, "schedule.count", *h_count)?;
            set_opt(&mut cfg, "reconstruct.epsilon", *epsilon)?;
            set_noise(&mut cfg, noise)?;
        }
        Command::Selftest { noise, .. } => set_noise(&mut cfg, noise)?,
        _ => {}
    }

    let workers: usize = cfg.get_or("run.workers", 0)?;
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("cannot start the worker pool")?;
    }

    let output = match cli.command {
        Command::Simulate { .. } => commands::run_simulate(&cfg)?,
        Command::Spectrum { .. } => commands::run_spectrum(&cfg)?,
        Command::Kernel { .. } => commands::run_kernel(&cfg)?,
        Command::Reconstruct { data, .. } => commands::run_reconstruct(&cfg, data)?,
        Command::Selftest { .. } => commands::run_selftest(&cfg)?,
    };
    output.write(&out_dir, &cfg.hash(name))?;
    Ok(!output.failed)
}

fn exit_status(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<conewave::Error>() {
            return match e.kind() {
                conewave::ErrorKind::Validation => 1,
                conewave::ErrorKind::Input => 2,
                conewave::ErrorKind::Numerical => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
