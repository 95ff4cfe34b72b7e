// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner behind the `distill` binary: configuration, engine
//! dispatch, CSV/SVG output and the on-disk state cache.

pub mod cache;
pub mod config;
pub mod error;
pub mod plot;
pub mod presets;
pub mod run;
pub mod table;

use std::path::{Path, PathBuf};

use distill_core::iterative::NoCache;

pub use config::{ExperimentConfig, Mode};
pub use error::CliError;
pub use table::{Provenance, ResultTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn provenance(cfg: &ExperimentConfig) -> Provenance {
    Provenance {
        version: VERSION,
        config_hash: cfg.hash(),
        config_echo: cfg.echo(),
    }
}

/// Validates, runs and writes one experiment; returns the files written.
pub fn execute(
    cfg: &ExperimentConfig,
    out: &Path,
    cache_dir: Option<&Path>,
    plot: bool,
) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let tables = match cache_dir {
        Some(dir) => {
            let cache = cache::DiskCache::new(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            run::run(cfg, &cache)?
        }
        None => run::run(cfg, &NoCache)?,
    };
    run::write_outputs(&tables, out, &provenance(cfg), plot)
}
