// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure at {point}: {source}")]
    Numerical {
        point: String,
        #[source]
        source: distill_core::Error,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Engine errors caused by bad input are configuration errors.
    pub fn engine(point: impl Into<String>, source: distill_core::Error) -> Self {
        if source.is_numerical() {
            CliError::Numerical {
                point: point.into(),
                source,
            }
        } else {
            CliError::Config(format!("at {}: {source}", point.into()))
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}
