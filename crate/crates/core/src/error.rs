// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulation engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("degenerate state: trace {trace:e} is below {threshold:e}")]
    DegenerateState { trace: f64, threshold: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("covariance matrix violates the uncertainty bound: det = {det:e}")]
    Unphysical { det: f64 },

    #[error("state has nonzero mean quadratures ({mx:e}, {mp:e})")]
    NonzeroMean { mx: f64, mp: f64 },

    #[error("truncation: {what} deficit {deficit:e} exceeds {tolerance:e}")]
    Truncation {
        what: &'static str,
        deficit: f64,
        tolerance: f64,
    },

    #[error("integration did not converge: {what} (change {change:e} > {tolerance:e})")]
    NotConverged {
        what: String,
        change: f64,
        tolerance: f64,
    },

    #[error("ill-conditioned evaluation: {0}")]
    IllConditioned(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors that originate in numerics rather than in bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter { .. } | Error::CutoffMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
