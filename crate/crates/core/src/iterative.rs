// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-copy purification in the Fock basis and its iteration.
//!
//! One step mixes two copies of `ρ` on a balanced beamsplitter, conditions
//! the first output port on the homodyne POVM element `C`, and keeps the
//! second port:
//!
//! `ρ'[j2][k2] = Σ_{j1,k1} C[k1][j1] (U (ρ⊗ρ) U†)[(j1,j2)][(k1,k2)]`.
//!
//! The beamsplitter unitary is block diagonal in the total photon number, so
//! the two-mode state is never materialized: for every pair of blocks
//! `(M, M')` the product block `P[m1][n1] = ρ[m1][n1] ρ[M−m1][M'−n1]` is
//! transformed as `U_M P U_{M'}ᵀ` and paired with the POVM straight away.
//! When `ρ` has support only on `m − n` even, pairs with `M − M'` odd vanish
//! and are skipped.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

use crate::analysis;
use crate::error::{Error, Result};
use crate::fock::{
    attenuate, bs_tensor, dephase, squeezed_vacuum_dm, BeamsplitterTensor, FockDensityMatrix,
    PhaseNoiseModel, SqueezedVacuumSpec,
};
use crate::measurement::{HomodynePOVM, Quadrature, Window};

/// Upper bound on the iteration count (each step doubles the copies consumed).
pub const MAX_ITERATIONS: usize = 12;

/// Normalized population in the two highest Fock levels above which a
/// truncation warning is attached to a state.
pub const EDGE_WARNING: f64 = 1e-8;

/// One purification step; the output is unnormalized and its trace is
/// `Tr[ρ]²` times the conditional acceptance probability.
pub fn purify_step(
    rho: &FockDensityMatrix,
    bs: &BeamsplitterTensor,
    povm: &HomodynePOVM,
) -> Result<FockDensityMatrix> {
    let c = rho.cutoff();
    for other in [bs.cutoff(), povm.cutoff()] {
        if other != c {
            return Err(Error::CutoffMismatch { left: c, right: other });
        }
    }
    let d = c + 1;
    let r: Vec<Complex64> = row_major(rho.elements());
    // cond[j1 * d + k1] = C[k1][j1]
    let cond: Vec<Complex64> = {
        let e = povm.elements();
        let mut v = vec![Complex64::new(0.0, 0.0); d * d];
        for j in 0..d {
            for k in 0..d {
                v[j * d + k] = e[(k, j)];
            }
        }
        v
    };
    let even = rho.has_even_support();
    let max_total = 2 * c;

    let partials: Vec<Vec<Complex64>> = (0..=max_total)
        .into_par_iter()
        .map(|total| {
            let mut out = vec![Complex64::new(0.0, 0.0); d * d];
            let ub = bs.block(total);
            let mut p = Vec::new();
            let mut t = Vec::new();
            for total_b in 0..=max_total {
                if even && (total + total_b) % 2 == 1 {
                    continue;
                }
                let vb = bs.block(total_b);
                contract_block_pair(&r, d, &cond, ub, vb, &mut p, &mut t, &mut out);
            }
            out
        })
        .collect();

    let mut acc = vec![Complex64::new(0.0, 0.0); d * d];
    for part in &partials {
        for (a, b) in acc.iter_mut().zip(part) {
            *a += b;
        }
    }
    let elements = nalgebra::DMatrix::from_row_slice(d, d, &acc);
    let mut out = FockDensityMatrix::new(elements, format!("purify[{}]", rho.label))?;
    if out.trace() > 0.0 {
        let edge = edge_population(&out);
        if edge > EDGE_WARNING {
            log::warn!("purify_step: edge population {edge:e} at cutoff {c}");
            out.label
                .push_str(&format!(" [truncation warning: edge population {edge:.3e}]"));
        }
    }
    Ok(out)
}

fn row_major(m: &nalgebra::DMatrix<Complex64>) -> Vec<Complex64> {
    let (rows, cols) = m.shape();
    let mut v = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            v.push(m[(i, j)]);
        }
    }
    v
}

#[allow(clippy::too_many_arguments)]
fn contract_block_pair(
    r: &[Complex64],
    d: usize,
    cond: &[Complex64],
    ub: &crate::fock::BeamsplitterBlock,
    vb: &crate::fock::BeamsplitterBlock,
    p: &mut Vec<Complex64>,
    t: &mut Vec<Complex64>,
    out: &mut [Complex64],
) {
    let (m_tot, lo, len) = (ub.total, ub.lo, ub.len);
    let (n_tot, lo_b, len_b) = (vb.total, vb.lo, vb.len);
    let zero = Complex64::new(0.0, 0.0);

    // product block of ρ⊗ρ
    p.clear();
    p.resize(len * len_b, zero);
    let mut any = false;
    for i in 0..len {
        let m1 = lo + i;
        let m2 = m_tot - m1;
        for k in 0..len_b {
            let n1 = lo_b + k;
            let n2 = n_tot - n1;
            let a = r[m1 * d + n1];
            if a == zero {
                continue;
            }
            let v = a * r[m2 * d + n2];
            p[i * len_b + k] = v;
            any |= v != zero;
        }
    }
    if !any {
        return;
    }

    // T = U_M P
    t.clear();
    t.resize(len * len_b, zero);
    for j in 0..len {
        let urow = &ub.coeffs[j * len..(j + 1) * len];
        let trow = &mut t[j * len_b..(j + 1) * len_b];
        for (i, &u) in urow.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            let prow = &p[i * len_b..(i + 1) * len_b];
            for (tv, pv) in trow.iter_mut().zip(prow) {
                *tv += pv * u;
            }
        }
    }

    // W = T U_{M'}ᵀ, paired with C and scattered to the kept mode
    for j in 0..len {
        let j1 = lo + j;
        let j2 = m_tot - j1;
        let trow = &t[j * len_b..(j + 1) * len_b];
        for l in 0..len_b {
            let k1 = lo_b + l;
            let cval = cond[j1 * d + k1];
            if cval == zero {
                continue;
            }
            let vrow = &vb.coeffs[l * len_b..(l + 1) * len_b];
            let w: Complex64 = trow.iter().zip(vrow).map(|(tv, &v)| tv * v).sum();
            let k2 = n_tot - k1;
            out[j2 * d + k2] += cval * w;
        }
    }
}

/// Normalized population of the two highest Fock levels.
pub fn edge_population(rho: &FockDensityMatrix) -> f64 {
    let c = rho.cutoff();
    let tr = rho.trace();
    let top: f64 = (c.saturating_sub(1)..=c).map(|n| rho.population(n)).sum();
    top / tr
}

/// Parameters of a `k`-step iterative purification run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    pub spec: SqueezedVacuumSpec,
    pub noise: PhaseNoiseModel,
    pub window: Window,
    /// Efficiency of the conditioning detector.
    pub eta: f64,
    pub quadrature: Quadrature,
    pub iterations: usize,
    pub cutoff: usize,
    /// Efficiency of the detector used to report variances and purity.
    pub verify_eta: f64,
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        SqueezedVacuumSpec::new(self.spec.vx, self.spec.vp)?;
        PhaseNoiseModel::new(self.noise.sigma)?;
        crate::fock::check_efficiency(self.eta)?;
        crate::fock::check_efficiency(self.verify_eta)?;
        if let Window::HalfWidth(x) = self.window {
            if !(x > 0.0) {
                return Err(Error::param("window", format!("half-width must be positive, got {x}")));
            }
        }
        if self.iterations > MAX_ITERATIONS {
            return Err(Error::param(
                "iterations",
                format!("at most {MAX_ITERATIONS}, got {}", self.iterations),
            ));
        }
        if self.cutoff < 2 {
            return Err(Error::param("cutoff", "must be at least 2"));
        }
        Ok(())
    }

    /// Canonical description of everything that determines the state after
    /// `k` steps. Equal fingerprints imply bit-identical states.
    pub fn fingerprint(&self, k: usize) -> String {
        let window = match self.window {
            Window::HalfWidth(x) => format!("{:016x}", x.to_bits()),
            Window::Infinite => "inf".into(),
        };
        let quad = match self.quadrature {
            Quadrature::Angle(t) => format!("{:016x}", t.to_bits()),
            Quadrature::Randomized => "rand".into(),
        };
        format!(
            "iterate/v1 vx={:016x} vp={:016x} sigma={:016x} window={window} eta={:016x} quad={quad} cutoff={} k={k}",
            self.spec.vx.to_bits(),
            self.spec.vp.to_bits(),
            self.noise.sigma.to_bits(),
            self.eta.to_bits(),
            self.cutoff
        )
    }
}

/// Diagnostics of the state after `k` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationReport {
    pub k: usize,
    /// `∏_{j≤k} s_j`: success probability of a chain in which every step
    /// receives freshly purified inputs. One for `k = 0`.
    pub cumulative_success: f64,
    /// `s_k`, the acceptance probability of step `k` on normalized inputs;
    /// one for `k = 0`.
    pub step_success: f64,
    /// Trace of the unnormalized recursion, `T_k = T_{k−1}² s_k` with
    /// `T_0 = Tr ρ^(0)`: the probability that all `2^k − 1` conditioning
    /// events of one run succeed.
    pub joint_success: f64,
    pub variance_x: f64,
    pub variance_p: f64,
    pub purity: f64,
    pub gaussian_fidelity: f64,
    /// `1 − Tr ρ^(0)` for the input; normalized top-level population afterwards.
    pub trace_deficit: f64,
}

/// Storage for intermediate states, keyed by [`IterationConfig::fingerprint`].
pub trait StateCache: Sync {
    fn get(&self, key: &str) -> Option<FockDensityMatrix>;
    fn put(&self, key: &str, rho: &FockDensityMatrix);
}

/// A cache that never hits.
pub struct NoCache;

impl StateCache for NoCache {
    fn get(&self, _key: &str) -> Option<FockDensityMatrix> {
        None
    }
    fn put(&self, _key: &str, _rho: &FockDensityMatrix) {}
}

/// Beamsplitter tensor and POVM for one configuration.
pub struct IterationEngine {
    pub config: IterationConfig,
    pub bs: BeamsplitterTensor,
    pub povm: HomodynePOVM,
}

impl IterationEngine {
    pub fn new(config: IterationConfig) -> Result<Self> {
        config.validate()?;
        let povm = HomodynePOVM::conditioning(config.window, config.eta, config.quadrature, config.cutoff)?;
        let bs = bs_tensor(config.cutoff);
        Ok(Self { config, bs, povm })
    }

    /// The dephased squeezed vacuum `ρ^(0)`.
    pub fn initial_state(&self) -> FockDensityMatrix {
        dephase(&squeezed_vacuum_dm(&self.config.spec, self.config.cutoff), &self.config.noise)
    }

    pub fn step(&self, rho: &FockDensityMatrix) -> Result<FockDensityMatrix> {
        purify_step(rho, &self.bs, &self.povm)
    }

    /// `ρ^(0)` followed by `purify_step(ρ̂^(k−1))` for `k = 1..`, where `ρ̂`
    /// is the normalized state; the trace of entry `k ≥ 1` is the step
    /// success `s_k`. Each entry is looked up in `cache` first.
    pub fn states(&self, cache: &dyn StateCache) -> Result<Vec<FockDensityMatrix>> {
        let mut states: Vec<FockDensityMatrix> = Vec::with_capacity(self.config.iterations + 1);
        for k in 0..=self.config.iterations {
            let key = self.config.fingerprint(k);
            let rho = match cache.get(&key) {
                Some(hit) if hit.cutoff() == self.config.cutoff => {
                    log::debug!("cache hit for k={k}");
                    hit
                }
                _ => {
                    let rho = if k == 0 {
                        self.initial_state()
                    } else {
                        self.step(&states[k - 1].normalized()?)?
                    };
                    cache.put(&key, &rho);
                    rho
                }
            };
            states.push(rho);
        }
        Ok(states)
    }

    /// Diagnostics for entry `k` of [`IterationEngine::states`];
    /// `previous` is the `(cumulative, joint)` success after `k − 1` steps.
    pub fn report(&self, k: usize, rho: &FockDensityMatrix, previous: Option<(f64, f64)>) -> Result<IterationReport> {
        let verify = self.config.verify_eta;
        let tr = rho.trace();
        let (step_success, cumulative_success, joint_success) = match previous {
            Some((cumulative, joint)) => (tr, cumulative * tr, joint * joint * tr),
            None => (1.0, 1.0, tr),
        };
        let observed = attenuate(&rho.normalized()?, verify)?;
        Ok(IterationReport {
            k,
            cumulative_success,
            step_success,
            joint_success,
            variance_x: analysis::quadrature_variance(rho, 0.0, verify)?,
            variance_p: analysis::quadrature_variance(rho, FRAC_PI_2, verify)?,
            purity: analysis::purity(&observed)?,
            gaussian_fidelity: analysis::gaussian_fidelity(rho)?,
            trace_deficit: if k == 0 { 1.0 - tr } else { edge_population(rho) },
        })
    }

    pub fn reports(&self, states: &[FockDensityMatrix]) -> Result<Vec<IterationReport>> {
        let mut out: Vec<IterationReport> = Vec::with_capacity(states.len());
        for (k, rho) in states.iter().enumerate() {
            let previous = out.last().map(|r| (r.cumulative_success, r.joint_success));
            out.push(self.report(k, rho, previous)?);
        }
        Ok(out)
    }
}

/// Runs `config.iterations` purification steps and reports on every state.
pub fn run_iterations(config: &IterationConfig) -> Result<Vec<IterationReport>> {
    run_iterations_cached(config, &NoCache)
}

pub fn run_iterations_cached(config: &IterationConfig, cache: &dyn StateCache) -> Result<Vec<IterationReport>> {
    let engine = IterationEngine::new(config.clone())?;
    let states = engine.states(cache)?;
    engine.reports(&states)
}

/// One row of a success/quality trade-off scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub half_width: f64,
    pub success: f64,
    pub variance_x: f64,
    pub purity: f64,
}

/// Final-step success probability, variance and purity as functions of the
/// acceptance window, evaluated in parallel over `half_widths`.
pub fn tradeoff_sweep(config: &IterationConfig, half_widths: &[f64]) -> Result<Vec<TradeoffPoint>> {
    half_widths
        .par_iter()
        .map(|&x| {
            let cfg = IterationConfig {
                window: Window::HalfWidth(x),
                ..config.clone()
            };
            let reports = run_iterations(&cfg)?;
            let last = reports[reports.len() - 1];
            Ok(TradeoffPoint {
                half_width: x,
                success: last.cumulative_success,
                variance_x: last.variance_x,
                purity: last.purity,
            })
        })
        .collect()
}
