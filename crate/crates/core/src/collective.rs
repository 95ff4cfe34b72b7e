// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Collective purification of `N` copies on a chain of `N − 1`
//! beamsplitters with zero-width homodyne conditioning on the first
//! `N − 1` output ports.
//!
//! For fixed phase shifts `φ` every copy is Gaussian, so the conditional
//! state of the last port is Gaussian with variance `V_N(φ)` and relative
//! acceptance density `w(φ)`. The purified variance is the `w`-weighted
//! average of `V_N` over independent Gaussian phases.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{PhaseNoiseModel, SqueezedVacuumSpec};
use crate::quadrature::{for_each_tensor_point, GaussRule};

/// Beamsplitter chain: copy 1 meets copy 2 on BS₁, the transmitted port
/// meets copy 3 on BS₂, and so on; the reflected port of BS_j is detected as
/// output `j` and the final transmitted port is output `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    pub transmittances: Vec<f64>,
    /// `x_out = U x_in`, `N × N` orthogonal.
    pub u: DMatrix<f64>,
    /// Symplectic matrix on `(x₁, p₁, …, x_N, p_N)`.
    pub s_bs: DMatrix<f64>,
}

impl InterferometerSpec {
    pub fn modes(&self) -> usize {
        self.u.nrows()
    }

    /// Coefficients of the kept output, `U[N][l] = r_{l−1} ∏_{j≥l} t_j`.
    pub fn output_row(&self) -> Vec<f64> {
        let n = self.modes();
        (0..n).map(|l| self.u[(n - 1, l)]).collect()
    }
}

/// Transmittances `t_j = √(j/(j+1))`, making the kept output the balanced
/// superposition `Σ x_l / √N`.
pub fn balanced_superposition_transmittances(n: usize) -> Vec<f64> {
    (1..n).map(|j| (j as f64 / (j as f64 + 1.0)).sqrt()).collect()
}

/// All beamsplitters 50:50.
pub fn balanced_chain_transmittances(n: usize) -> Vec<f64> {
    vec![std::f64::consts::FRAC_1_SQRT_2; n.saturating_sub(1)]
}

/// Composes the two-mode beamsplitter symplectics of the chain.
pub fn build_interferometer(transmittances: &[f64]) -> Result<InterferometerSpec> {
    if transmittances.is_empty() {
        return Err(Error::param("transmittances", "need at least one beamsplitter (N ≥ 2)"));
    }
    for &t in transmittances {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::param(
                "transmittances",
                format!("each t_j must lie in (0, 1), got {t}"),
            ));
        }
    }
    let n = transmittances.len() + 1;
    let mut s = DMatrix::<f64>::identity(2 * n, 2 * n);
    for (j, &t) in transmittances.iter().enumerate() {
        let r = (1.0 - t * t).sqrt();
        // running mode j, fresh copy j+1; reflected port stays at j
        let mut bs = DMatrix::<f64>::identity(2 * n, 2 * n);
        for q in 0..2 {
            let a = 2 * j + q;
            let b = 2 * (j + 1) + q;
            bs[(a, a)] = r;
            bs[(a, b)] = -t;
            bs[(b, a)] = t;
            bs[(b, b)] = r;
        }
        s = bs * s;
    }
    let u = DMatrix::from_fn(n, n, |i, l| s[(2 * i, 2 * l)]);

    let spec = InterferometerSpec {
        transmittances: transmittances.to_vec(),
        u,
        s_bs: s,
    };
    let row = spec.output_row();
    for (l, &coef) in row.iter().enumerate() {
        let r_prev = if l == 0 {
            1.0
        } else {
            (1.0 - transmittances[l - 1].powi(2)).sqrt()
        };
        let expect = r_prev * transmittances[l..].iter().product::<f64>();
        if (coef - expect).abs() > 1e-12 {
            log::error!("chain composition disagrees with closed form at l={l}: {coef} vs {expect}");
        }
    }
    Ok(spec)
}

/// Symplectic form `⊕ [[0, 1], [−1, 0]]` in the interleaved ordering.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// Detected quadratures and their common efficiency. The kept port is
/// always read out along `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningSpec {
    /// `θ_j` for detectors `1..N−1`; detector `j` records `x cos θ_j + p sin θ_j`.
    pub angles: Vec<f64>,
    pub eta: f64,
}

impl ConditioningSpec {
    pub fn x_only(n: usize) -> Self {
        Self {
            angles: vec![0.0; n.saturating_sub(1)],
            eta: 1.0,
        }
    }
}

/// Conditional variance `Ṽ` with `1/Ṽ = Σ U²_{N,j}/V_j` and weight
/// `√Ṽ / ∏ √V_j`, for `x`-conditioning with ideal detectors.
pub fn conditional_variance_x(phis: &[f64], spec: &InterferometerSpec, sv: &SqueezedVacuumSpec) -> (f64, f64) {
    let n = spec.modes();
    debug_assert_eq!(phis.len(), n);
    let mut inv = 0.0;
    let mut prod = 1.0;
    for (j, &phi) in phis.iter().enumerate() {
        let v = sv.variance_at(phi);
        let u = spec.u[(n - 1, j)];
        inv += u * u / v;
        prod *= v;
    }
    let vt = 1.0 / inv;
    (vt, (vt / prod).sqrt())
}

/// Precomputed map from input quadratures to the detected `x` quadratures
/// after the chain and the per-detector phase shifts.
#[derive(Debug, Clone)]
pub struct ConditioningMap {
    n: usize,
    eta: f64,
    /// `N × 2N`
    rows: DMatrix<f64>,
}

impl ConditioningMap {
    pub fn new(spec: &InterferometerSpec, cond: &ConditioningSpec) -> Result<Self> {
        let n = spec.modes();
        if cond.angles.len() != n - 1 {
            return Err(Error::param(
                "angles",
                format!("expected {} conditioning angles, got {}", n - 1, cond.angles.len()),
            ));
        }
        crate::fock::check_efficiency(cond.eta)?;
        // R(−θ_j) maps q(θ_j) onto x; the kept port has θ_N = 0
        let mut rot = DMatrix::<f64>::identity(2 * n, 2 * n);
        for (j, &theta) in cond.angles.iter().enumerate() {
            let (s, c) = theta.sin_cos();
            rot[(2 * j, 2 * j)] = c;
            rot[(2 * j, 2 * j + 1)] = s;
            rot[(2 * j + 1, 2 * j)] = -s;
            rot[(2 * j + 1, 2 * j + 1)] = c;
        }
        let full = rot * &spec.s_bs;
        let rows = DMatrix::from_fn(n, 2 * n, |i, k| full[(2 * i, k)]);
        Ok(Self { n, eta: cond.eta, rows })
    }

    /// `(V_N, weight)` with `V_N = 1/[(Σ_x⁻¹)_{NN}]` and weight `√(V_N/|Σ_x|)`.
    pub fn evaluate(&self, phis: &[f64], sv: &SqueezedVacuumSpec) -> (f64, f64) {
        let n = self.n;
        let mut sx = vec![0.0; n * n];
        for (j, &phi) in phis.iter().enumerate() {
            let (s, c) = phi.sin_cos();
            // R(φ) diag(Vx, Vp) R(φ)ᵀ
            let a = sv.vx * c * c + sv.vp * s * s;
            let b = sv.vx * s * s + sv.vp * c * c;
            let o = (sv.vx - sv.vp) * s * c;
            for i in 0..n {
                let li0 = self.rows[(i, 2 * j)];
                let li1 = self.rows[(i, 2 * j + 1)];
                let ti0 = a * li0 + o * li1;
                let ti1 = o * li0 + b * li1;
                for k in 0..=i {
                    let lk0 = self.rows[(k, 2 * j)];
                    let lk1 = self.rows[(k, 2 * j + 1)];
                    sx[i * n + k] += ti0 * lk0 + ti1 * lk1;
                }
            }
        }
        let noise = 0.5 * (1.0 - self.eta);
        for i in 0..n {
            for k in 0..=i {
                sx[i * n + k] *= self.eta;
            }
            sx[i * n + i] += noise;
        }
        // Cholesky: the last pivot is the Schur complement of the detected
        // block, i.e. the conditional variance of the kept port
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..=i {
                let mut sum = sx[i * n + k];
                for m in 0..k {
                    sum -= l[i * n + m] * l[k * n + m];
                }
                if i == k {
                    l[i * n + i] = sum.max(0.0).sqrt();
                } else {
                    l[i * n + k] = sum / l[k * n + k];
                }
            }
        }
        let pivot = l[(n - 1) * n + (n - 1)];
        let detected: f64 = (0..n - 1).map(|i| l[i * n + i]).product();
        (pivot * pivot, 1.0 / detected)
    }
}

/// General conditioning (arbitrary quadratures, common efficiency `η`).
pub fn conditional_variance_general(
    phis: &[f64],
    spec: &InterferometerSpec,
    cond: &ConditioningSpec,
    sv: &SqueezedVacuumSpec,
) -> Result<(f64, f64)> {
    Ok(ConditioningMap::new(spec, cond)?.evaluate(phis, sv))
}

/// How phase averages are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationMethod {
    /// Tensor-product midpoint rule over one period per phase, weighted by
    /// the wrapped normal density. The integrands are π-periodic in every
    /// phase, so this converges geometrically. `nodes` is a minimum; narrow
    /// distributions get more.
    Periodic { nodes: usize },
    /// Tensor-product Gauss–Hermite with the given nodes per dimension.
    GaussHermite { nodes: usize },
    /// Seeded Monte Carlo.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub method: IntegrationMethod,
    /// Re-run a tensor rule with doubled nodes and fail if the result moves
    /// by more than `tolerance`.
    pub check_convergence: bool,
    pub tolerance: f64,
    /// Tensor-rule requests above this many copies switch to Monte Carlo.
    pub max_tensor_dim: usize,
    pub fallback_samples: usize,
    pub fallback_seed: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            method: IntegrationMethod::Periodic { nodes: 32 },
            check_convergence: true,
            tolerance: 1e-6,
            max_tensor_dim: 4,
            fallback_samples: 1_000_000,
            fallback_seed: 0x5eed,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        match self.method {
            IntegrationMethod::Periodic { nodes } | IntegrationMethod::GaussHermite { nodes } if nodes < 8 => {
                Err(Error::param("nodes", format!("need at least 8, got {nodes}")))
            }
            IntegrationMethod::MonteCarlo { samples, .. } if samples < 10_000 => {
                Err(Error::param("samples", format!("need at least 10000, got {samples}")))
            }
            _ => Ok(()),
        }
    }
}

/// A weighted phase average and, for Monte Carlo, its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
    pub evaluations: usize,
}

const MC_CHUNK: usize = 1 << 14;

/// `⟨w V⟩ / ⟨w⟩` over `dim` independent normal phases of width `sigma`.
pub fn weighted_phase_average<F>(dim: usize, sigma: f64, integ: &IntegrationConfig, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    integ.validate()?;
    let tensor = |nodes: usize| -> GaussRule {
        match integ.method {
            IntegrationMethod::GaussHermite { .. } => GaussRule::normal(nodes, sigma),
            _ => GaussRule::periodic_normal(GaussRule::periodic_nodes(nodes, sigma), sigma),
        }
    };
    let nodes = match integ.method {
        IntegrationMethod::MonteCarlo { samples, seed } => {
            return Ok(monte_carlo_average(dim, sigma, samples, seed, &f));
        }
        _ if dim > integ.max_tensor_dim => {
            return Ok(monte_carlo_average(
                dim,
                sigma,
                integ.fallback_samples,
                integ.fallback_seed,
                &f,
            ));
        }
        IntegrationMethod::Periodic { nodes } | IntegrationMethod::GaussHermite { nodes } => nodes,
    };
    let coarse = tensor_average(dim, &tensor(nodes), &f);
    if !integ.check_convergence || sigma == 0.0 {
        return Ok(coarse);
    }
    let fine = tensor_average(dim, &tensor(2 * nodes), &f);
    let change = (fine.value - coarse.value).abs();
    if change > integ.tolerance {
        return Err(Error::NotConverged {
            what: format!("{dim}-dimensional tensor rule with {nodes} nodes at sigma={sigma}"),
            change,
            tolerance: integ.tolerance,
        });
    }
    Ok(fine)
}

fn tensor_average<F>(dim: usize, rule: &GaussRule, f: &F) -> Estimate
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    // split the first axis across threads; each slice is summed in order
    let slices: Vec<(f64, f64)> = (0..rule.len())
        .into_par_iter()
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            let mut point = vec![0.0; dim];
            point[0] = rule.nodes[i];
            for_each_tensor_point(rule, dim - 1, |rest, w| {
                point[1..].copy_from_slice(rest);
                let (v, weight) = f(&point);
                let ww = w * rule.weights[i] * weight;
                num += ww * v;
                den += ww;
            });
            (num, den)
        })
        .collect();
    let (num, den) = slices
        .iter()
        .fold((0.0, 0.0), |(a, b), (n, d)| (a + n, b + d));
    Estimate {
        value: num / den,
        std_error: None,
        evaluations: rule.len().pow(dim as u32),
    }
}

fn monte_carlo_average<F>(dim: usize, sigma: f64, samples: usize, seed: u64, f: &F) -> Estimate
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    // (Σw, Σwv, Σw², Σw²v, Σw²v²) per chunk
    let sums: Vec<[f64; 5]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let normal = Normal::new(0.0, sigma).expect("sigma validated non-negative");
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = [0.0; 5];
            let mut point = vec![0.0; dim];
            for _ in 0..count {
                for p in point.iter_mut() {
                    *p = normal.sample(&mut rng);
                }
                let (v, w) = f(&point);
                acc[0] += w;
                acc[1] += w * v;
                acc[2] += w * w;
                acc[3] += w * w * v;
                acc[4] += w * w * v * v;
            }
            acc
        })
        .collect();
    let mut tot = [0.0; 5];
    for s in &sums {
        for (t, v) in tot.iter_mut().zip(s) {
            *t += v;
        }
    }
    let ratio = tot[1] / tot[0];
    // delta-method variance of a ratio estimator
    let spread = tot[4] - 2.0 * ratio * tot[3] + ratio * ratio * tot[2];
    let std_error = spread.max(0.0).sqrt() / tot[0];
    Estimate {
        value: ratio,
        std_error: Some(std_error),
        evaluations: samples,
    }
}

/// Purified `x` variance for ideal `x` conditioning.
pub fn collective_variance_x(
    spec: &InterferometerSpec,
    sv: &SqueezedVacuumSpec,
    noise: &PhaseNoiseModel,
    integ: &IntegrationConfig,
) -> Result<f64> {
    Ok(collective_variance_x_estimate(spec, sv, noise, integ)?.value)
}

pub fn collective_variance_x_estimate(
    spec: &InterferometerSpec,
    sv: &SqueezedVacuumSpec,
    noise: &PhaseNoiseModel,
    integ: &IntegrationConfig,
) -> Result<Estimate> {
    weighted_phase_average(spec.modes(), noise.sigma, integ, |phis| {
        conditional_variance_x(phis, spec, sv)
    })
}

/// Purified `x` variance for arbitrary conditioning quadratures and
/// detector efficiency; as seen by a detector of the same efficiency.
pub fn collective_variance_general(
    spec: &InterferometerSpec,
    cond: &ConditioningSpec,
    sv: &SqueezedVacuumSpec,
    noise: &PhaseNoiseModel,
    integ: &IntegrationConfig,
) -> Result<f64> {
    Ok(collective_variance_general_estimate(spec, cond, sv, noise, integ)?.value)
}

pub fn collective_variance_general_estimate(
    spec: &InterferometerSpec,
    cond: &ConditioningSpec,
    sv: &SqueezedVacuumSpec,
    noise: &PhaseNoiseModel,
    integ: &IntegrationConfig,
) -> Result<Estimate> {
    let map = ConditioningMap::new(spec, cond)?;
    weighted_phase_average(spec.modes(), noise.sigma, integ, |phis| map.evaluate(phis, sv))
}
