// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Multi-copy purification of phase-diffused squeezed vacuum.
//!
//! Three engines share the same physical model:
//!
//! - [`iterative`]: the two-copy beamsplitter/homodyne map evaluated exactly
//!   in a truncated Fock basis, iterated `k` times.
//! - [`collective`]: `N` copies on a beamsplitter chain conditioned on
//!   `N − 1` zero-width homodyne outcomes, via covariance matrices averaged
//!   over the random phases.
//! - [`asymptotic`]: the Gaussian fixed point reached after infinitely many
//!   iterations.
//!
//! Quadratures use `x = (a + a†)/√2`; vacuum variance is 1/2.

pub mod analysis;
pub mod asymptotic;
pub mod collective;
pub mod cov;
pub mod error;
pub mod fock;
pub mod iterative;
pub mod measurement;
pub mod quadrature;

pub use error::{Error, Result};
pub use fock::{FockDensityMatrix, PhaseNoiseModel, SqueezedVacuumSpec};
