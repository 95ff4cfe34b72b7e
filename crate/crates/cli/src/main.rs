// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distill_cli::{execute, presets, CliError, ExperimentConfig, Mode};

/// Simulations of multi-copy purification of phase-diffused squeezed light.
#[derive(Parser, Debug)]
#[command(name = "distill", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Also render each panel as SVG.
    #[arg(long, global = true)]
    plot: bool,

    /// Directory for cached intermediate Fock states.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for Monte Carlo integration; overrides the file.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-copy iterative purification in the Fock basis.
    Iterate,
    /// N-copy collective purification.
    Collective,
    /// Infinite-iteration limit.
    Asymptotic,
    /// Success probability against final quality over acceptance windows.
    Tradeoff,
    /// Reproduce a figure from a shipped preset (fig2 to fig10).
    Figure { name: String },
    /// Run whatever grid the configuration file describes.
    Sweep,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let forced = match cli.command {
        Command::Iterate => Some(Mode::Iterate),
        Command::Collective => Some(Mode::Collective),
        Command::Asymptotic => Some(Mode::Asymptotic),
        Command::Tradeoff => Some(Mode::Tradeoff),
        Command::Figure { .. } | Command::Sweep => None,
    };
    let mut cfg = match (&cli.command, &cli.config) {
        (Command::Figure { name }, None) => presets::load(name)?,
        (Command::Figure { .. }, Some(_)) => {
            return Err(CliError::Config("`figure` takes its configuration from the preset".into()))
        }
        (Command::Sweep, None) => return Err(CliError::Config("`sweep` needs --config".into())),
        (_, Some(path)) => ExperimentConfig::load(path)?,
        (_, None) => ExperimentConfig::default(),
    };
    if let Some(mode) = forced {
        match cfg.mode {
            Some(m) if m != mode => {
                return Err(CliError::Config(format!(
                    "`mode`: file says {} but the subcommand is {}",
                    m.name(),
                    mode.name()
                )))
            }
            _ => cfg.mode = Some(mode),
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = load(&cli).and_then(|cfg| execute(&cfg, &cli.out, cli.cache.as_deref(), cli.plot));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
