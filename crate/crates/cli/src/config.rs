// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Flat TOML experiment schema.
//!
//! Every key has a default, so an empty file is a valid `iterate` run once a
//! mode is supplied. Axis keys (`sigma`, `theta`, `window`) take a number, an
//! array, or an inline table `{ start, stop, points }` (inclusive ends).
//! The fully resolved configuration, defaults included, is echoed into every
//! output header and hashed for provenance.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use distill_core::collective::{
    balanced_chain_transmittances, balanced_superposition_transmittances, IntegrationConfig, IntegrationMethod,
};
use distill_core::measurement::{Quadrature, Window};
use distill_core::{PhaseNoiseModel, SqueezedVacuumSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Iterate,
    Collective,
    Asymptotic,
    Tradeoff,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Iterate => "iterate",
            Mode::Collective => "collective",
            Mode::Asymptotic => "asymptotic",
            Mode::Tradeoff => "tradeoff",
        }
    }
}

/// A parameter that may be swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    One(f64),
    Many(Vec<f64>),
    Span { start: f64, stop: f64, points: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::One(v) => vec![*v],
            Axis::Many(v) => v.clone(),
            Axis::Span { start, stop, points } => match points {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Beamsplitter chain: a named family or explicit amplitude transmittances
/// (one per beamsplitter, so `copies − 1` entries).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Transmittances {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Engine; may be left out when the subcommand names it.
    pub mode: Option<Mode>,
    /// Stem of the output files; defaults to the mode name.
    pub name: Option<String>,
    pub vx: f64,
    pub vp: f64,
    /// Phase-noise standard deviation in radians.
    pub sigma: Axis,
    /// Acceptance half-width `X` of the homodyne window; `inf` accepts all.
    pub window: Axis,
    /// Conditioning detector efficiency.
    pub eta: f64,
    /// Efficiency of the detector that reports variances and purity.
    pub verify_eta: f64,
    /// `x`, `p`, `randomized` or an angle in radians, for `iterate`/`tradeoff`.
    pub quadrature: OneOrMany<String>,
    pub iterations: usize,
    pub cutoff: usize,
    pub copies: OneOrMany<usize>,
    /// `equal-weight` (kept port is the balanced superposition),
    /// `balanced-chain` (every beamsplitter 50:50) or a list.
    pub transmittances: Transmittances,
    /// Detector strategies for `collective`; each entry lists the
    /// `copies − 1` measured quadratures, e.g. `"x,p"`. Empty means all `x`.
    pub detectors: Vec<String>,
    /// Conditioning angle for `asymptotic`.
    pub theta: Axis,
    /// Squeezing values used to extrapolate the asymptotic limit.
    pub r_schedule: Vec<f64>,
    /// `asymptotic` only: also run the Fock iteration at `window` and tabulate
    /// it next to the limit.
    pub compare_iterations: bool,
    /// `periodic`, `gauss-hermite` or `monte-carlo`.
    pub integration: String,
    pub nodes: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub check_convergence: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let integ = IntegrationConfig::default();
        Self {
            mode: None,
            name: None,
            vx: 0.2,
            vp: 2.0,
            sigma: Axis::One(0.5),
            window: Axis::One(0.45),
            eta: 1.0,
            verify_eta: 1.0,
            quadrature: OneOrMany::One("x".into()),
            iterations: 4,
            cutoff: 30,
            copies: OneOrMany::One(2),
            transmittances: Transmittances::Named("equal-weight".into()),
            detectors: Vec::new(),
            theta: Axis::One(0.0),
            r_schedule: distill_core::asymptotic::DEFAULT_R_SCHEDULE.to_vec(),
            compare_iterations: false,
            integration: "periodic".into(),
            nodes: 32,
            samples: integ.fallback_samples,
            seed: integ.fallback_seed,
            tolerance: integ.tolerance,
            check_convergence: integ.check_convergence,
        }
    }
}

fn bad(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {reason}"))
}

/// Parses `x`, `p`, `randomized` or a number of radians.
pub fn parse_quadrature(s: &str) -> Option<Quadrature> {
    match s.trim() {
        "x" => Some(Quadrature::Angle(0.0)),
        "p" => Some(Quadrature::Angle(FRAC_PI_2)),
        "randomized" | "random" => Some(Quadrature::Randomized),
        other => other.parse::<f64>().ok().filter(|t| t.is_finite()).map(Quadrature::Angle),
    }
}

/// Parses one detector angle: `x`, `p` or radians.
fn parse_angle(s: &str) -> Option<f64> {
    match parse_quadrature(s)? {
        Quadrature::Angle(t) => Some(t),
        Quadrature::Randomized => None,
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        self.mode.ok_or_else(|| bad("mode", "missing; set it in the file or use a mode subcommand"))
    }

    pub fn stem(&self) -> String {
        match (&self.name, self.mode) {
            (Some(n), _) => n.clone(),
            (None, Some(m)) => m.name().into(),
            (None, None) => "run".into(),
        }
    }

    /// Canonical TOML of the resolved configuration.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().as_bytes()))
    }

    pub fn spec(&self) -> SqueezedVacuumSpec {
        SqueezedVacuumSpec::new(self.vx, self.vp).expect("validated")
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.sigma.values()
    }

    pub fn noise(sigma: f64) -> PhaseNoiseModel {
        PhaseNoiseModel::new(sigma).expect("validated")
    }

    pub fn windows(&self) -> Vec<Window> {
        self.window
            .values()
            .into_iter()
            .map(|x| if x.is_infinite() { Window::Infinite } else { Window::HalfWidth(x) })
            .collect()
    }

    pub fn quadratures(&self) -> Vec<(String, Quadrature)> {
        self.quadrature
            .values()
            .into_iter()
            .map(|s| {
                let q = parse_quadrature(&s).expect("validated");
                (s, q)
            })
            .collect()
    }

    pub fn transmittances_for(&self, copies: usize) -> Vec<f64> {
        match &self.transmittances {
            Transmittances::Named(n) if n == "balanced-chain" => balanced_chain_transmittances(copies),
            Transmittances::Named(_) => balanced_superposition_transmittances(copies),
            Transmittances::Explicit(t) => t.clone(),
        }
    }

    /// `(label, angles)` per detector strategy; all-`x` when none are given.
    pub fn strategies(&self, copies: usize) -> Vec<(String, Vec<f64>)> {
        if self.detectors.is_empty() {
            return vec![("x".into(), vec![0.0; copies - 1])];
        }
        self.detectors
            .iter()
            .map(|d| {
                let angles = d.split(',').map(|s| parse_angle(s).expect("validated")).collect();
                (d.replace(' ', "").replace(',', "/"), angles)
            })
            .collect()
    }

    pub fn integration_config(&self) -> IntegrationConfig {
        let method = match self.integration.as_str() {
            "gauss-hermite" => IntegrationMethod::GaussHermite { nodes: self.nodes },
            "monte-carlo" => IntegrationMethod::MonteCarlo {
                samples: self.samples,
                seed: self.seed,
            },
            _ => IntegrationMethod::Periodic { nodes: self.nodes },
        };
        IntegrationConfig {
            method,
            check_convergence: self.check_convergence,
            tolerance: self.tolerance,
            fallback_samples: self.samples,
            fallback_seed: self.seed,
            ..IntegrationConfig::default()
        }
    }

    /// Checks everything the engines would reject, naming the field.
    pub fn validate(&self) -> Result<(), CliError> {
        let mode = self.mode()?;
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(bad("name", format!("`{name}` is not a plain file stem")));
            }
        }
        SqueezedVacuumSpec::new(self.vx, self.vp).map_err(|e| bad("vx/vp", e))?;
        check_axis("sigma", &self.sigma, |s| s >= 0.0 && s.is_finite(), "non-negative")?;
        check_axis("window", &self.window, |x| x > 0.0, "positive (or inf)")?;
        check_axis("theta", &self.theta, f64::is_finite, "finite")?;
        for (field, v) in [("eta", self.eta), ("verify_eta", self.verify_eta)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(bad(field, format!("must lie in (0, 1], got {v}")));
            }
        }
        for q in self.quadrature.values() {
            if parse_quadrature(&q).is_none() {
                return Err(bad("quadrature", format!("unknown quadrature `{q}`")));
            }
        }
        if self.iterations > distill_core::iterative::MAX_ITERATIONS {
            return Err(bad(
                "iterations",
                format!("at most {}, got {}", distill_core::iterative::MAX_ITERATIONS, self.iterations),
            ));
        }
        if self.cutoff < 2 || self.cutoff > 80 {
            return Err(bad("cutoff", format!("must lie in [2, 80], got {}", self.cutoff)));
        }
        let copies = self.copies.values();
        if copies.is_empty() || copies.iter().any(|&n| n < 2) {
            return Err(bad("copies", "every entry must be at least 2"));
        }
        match &self.transmittances {
            Transmittances::Named(n) if n != "equal-weight" && n != "balanced-chain" => {
                return Err(bad("transmittances", format!("unknown scheme `{n}`")));
            }
            Transmittances::Explicit(t) => {
                if copies.iter().any(|&n| n != t.len() + 1) {
                    return Err(bad("transmittances", "explicit list needs copies − 1 entries"));
                }
                if t.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                    return Err(bad("transmittances", "entries must lie in (0, 1)"));
                }
            }
            _ => {}
        }
        if !self.detectors.is_empty() {
            for d in &self.detectors {
                let parts: Vec<&str> = d.split(',').collect();
                if parts.iter().any(|p| parse_angle(p).is_none()) {
                    return Err(bad("detectors", format!("cannot parse `{d}`")));
                }
                if copies.iter().any(|&n| n != parts.len() + 1) {
                    return Err(bad("detectors", format!("`{d}` needs copies − 1 entries")));
                }
            }
        }
        if self.r_schedule.len() < 2 || self.r_schedule.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("r_schedule", "need at least two strictly increasing values"));
        }
        if !matches!(self.integration.as_str(), "periodic" | "gauss-hermite" | "monte-carlo") {
            return Err(bad("integration", format!("unknown method `{}`", self.integration)));
        }
        self.integration_config().validate().map_err(|e| bad("nodes/samples", e))?;
        if !(self.tolerance > 0.0) {
            return Err(bad("tolerance", "must be positive"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(bad("seed", "must fit in a signed 64-bit integer"));
        }
        if mode == Mode::Tradeoff {
            if self.windows().contains(&Window::Infinite) {
                return Err(bad("window", "tradeoff needs finite windows"));
            }
            if self.quadrature.values().len() != 1 {
                return Err(bad("quadrature", "tradeoff takes a single quadrature"));
            }
        }
        if mode == Mode::Asymptotic && self.compare_iterations {
            if self.theta.values().len() != 1 || self.window.values().len() != 1 {
                return Err(bad("compare_iterations", "needs a single `theta` and a single `window`"));
            }
        }
        Ok(())
    }
}

fn check_axis(field: &str, axis: &Axis, ok: impl Fn(f64) -> bool, what: &str) -> Result<(), CliError> {
    if let Axis::Span { points, .. } = axis {
        if *points == 0 {
            return Err(bad(field, "span needs at least one point"));
        }
    }
    let values = axis.values();
    if values.is_empty() {
        return Err(bad(field, "empty axis"));
    }
    match values.iter().find(|&&v| !ok(v)) {
        Some(v) => Err(bad(field, format!("values must be {what}, got {v}"))),
        None => Ok(()),
    }
}
