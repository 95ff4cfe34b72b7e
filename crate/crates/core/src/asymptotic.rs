// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Limit of infinitely many purification rounds with zero-width
//! conditioning.
//!
//! Projecting onto `q(θ) = 0` is modelled as projecting onto a squeezed
//! vacuum with squeezing `r`; the limit `r → ∞` is taken numerically along a
//! schedule. For every phase `φ` the copy (after the detector-loss pre-map)
//! contributes `Γ_φ = (S_r Σ_φ S_r + I/2)⁻¹` weighted by `√|Γ_φ|`.
//!
//! A direct evaluation cancels catastrophically once `e^{2r}` dominates, so
//! all averages are formed from quantities scaled by `ε = e^{−2r}`:
//! with `(a, b, c)` the entries of `Σ_φ` in the measurement frame and
//! `det = ab − c²`,
//!
//! ```text
//! D = a/2 + ε(det + 1/4) + ε² b/2         (ε · det of Γ_φ⁻¹)
//! ĝ11 = ⟨(1/2 + ε b) D^{-3/2}⟩ / ⟨D^{-1/2}⟩
//! ĝ22 = ⟨(a + ε/2)   D^{-3/2}⟩ / ⟨D^{-1/2}⟩
//! ĝ12 = −⟨c          D^{-3/2}⟩ / ⟨D^{-1/2}⟩
//! ĥ22 = ⟨(det + ε b/2) D^{-3/2}⟩ / ⟨D^{-1/2}⟩    (= (1 − ĝ22/2)/ε)
//! ```
//!
//! and `Γ = [[ε ĝ11, ε ĝ12], [ε ĝ12, ĝ22]]`.

use crate::cov::{self, Cov2};
use crate::error::{Error, Result};
use crate::fock::{check_efficiency, PhaseNoiseModel, SqueezedVacuumSpec};
use crate::quadrature::GaussRule;

pub use crate::cov::{attenuate as attenuation_cm, inverse_attenuate as inverse_attenuation_cm};

/// Minimum nodes per period for the one-dimensional phase averages.
pub const PHASE_NODES: usize = 64;
/// Default squeezing schedule.
pub const DEFAULT_R_SCHEDULE: [f64; 4] = [6.0, 8.0, 10.0, 12.0];
/// Largest allowed change between the last two schedule points.
pub const GAP_TOLERANCE: f64 = 1e-8;
const QUADRATURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticResult {
    pub vx_lim: f64,
    pub vp_lim: f64,
    pub sigma_lim: Cov2,
    pub purity_lim: f64,
    /// The reported matrix is what a detector of efficiency `verify_eta`
    /// would see, rather than the loss-corrected state.
    pub as_verified: bool,
    pub verify_eta: Option<f64>,
    /// Infinite for the closed form.
    pub r_used: f64,
    pub convergence_gap: f64,
    /// Non-fatal findings such as an uncertainty-relation violation of the
    /// formally loss-corrected matrix.
    pub caveats: Vec<String>,
}

impl AsymptoticResult {
    fn from_sigma(sigma: Cov2, as_verified: bool, verify_eta: Option<f64>, r_used: f64, gap: f64) -> Self {
        let mut caveats = Vec::new();
        let det = sigma.determinant();
        if det < 0.25 - 1e-10 {
            caveats.push(format!(
                "covariance matrix violates the uncertainty relation (det = {det:.6e} < 1/4)"
            ));
        }
        Self {
            vx_lim: sigma[(0, 0)],
            vp_lim: sigma[(1, 1)],
            sigma_lim: sigma,
            purity_lim: if det > 0.0 { cov::purity(&sigma) } else { f64::NAN },
            as_verified,
            verify_eta,
            r_used,
            convergence_gap: gap,
            caveats,
        }
    }
}

fn phase_rule(noise: &PhaseNoiseModel, nodes: usize) -> GaussRule {
    GaussRule::periodic_normal(GaussRule::periodic_nodes(nodes, noise.sigma), noise.sigma)
}

/// Closed form for `x` conditioning with ideal detectors:
/// `Vx = ⟨A⟩/⟨A³⟩`, `Vp = VxVp·⟨A³⟩/⟨A⟩` with `A = V(φ)^{-1/2}`.
pub fn asymptotic_ideal(sv: &SqueezedVacuumSpec, noise: &PhaseNoiseModel) -> Result<AsymptoticResult> {
    let ratio = |nodes: usize| {
        let rule = phase_rule(noise, nodes);
        let a1 = rule.integrate(|phi| sv.variance_at(phi).powf(-0.5));
        let a3 = rule.integrate(|phi| sv.variance_at(phi).powf(-1.5));
        a1 / a3
    };
    let coarse = ratio(PHASE_NODES);
    let fine = ratio(2 * PHASE_NODES);
    let change = (fine - coarse).abs();
    if change > QUADRATURE_TOLERANCE * fine {
        return Err(Error::NotConverged {
            what: format!("phase average at sigma={}", noise.sigma),
            change,
            tolerance: QUADRATURE_TOLERANCE * fine,
        });
    }
    let vx = fine;
    let vp = sv.vx * sv.vp / vx;
    let sigma = Cov2::new(vx, 0.0, 0.0, vp);
    Ok(AsymptoticResult::from_sigma(sigma, false, None, f64::INFINITY, change))
}

/// Scaled averages `(ĝ11, ĝ22, ĝ12, ĥ22)` in the measurement frame.
fn scaled_gamma(rule: &GaussRule, sv: &SqueezedVacuumSpec, theta: f64, eta: f64, eps: f64) -> [f64; 4] {
    let base = Cov2::new(sv.vx, 0.0, 0.0, sv.vp);
    let mut n0 = 0.0;
    let mut acc = [0.0; 4];
    for (&phi, &w) in rule.nodes.iter().zip(&rule.weights) {
        // R(θ)ᵀ · M_η(R(φ) Σ R(φ)ᵀ) · R(θ)
        let s = cov::rotate(&cov::attenuate(&cov::rotate(&base, phi), eta), -theta);
        let (a, b, c) = (s[(0, 0)], s[(1, 1)], s[(0, 1)]);
        let det = a * b - c * c;
        let d = 0.5 * a + eps * (det + 0.25) + 0.5 * eps * eps * b;
        let d12 = d.powf(-0.5);
        let d32 = d12 / d;
        n0 += w * d12;
        acc[0] += w * (0.5 + eps * b) * d32;
        acc[1] += w * (a + 0.5 * eps) * d32;
        acc[2] -= w * c * d32;
        acc[3] += w * (det + 0.5 * eps * b) * d32;
    }
    acc.map(|v| v / n0)
}

/// Weighted average `Γ = ⟨Γ_φ √|Γ_φ|⟩ / ⟨√|Γ_φ|⟩` at finite squeezing `r`,
/// in the frame of the conditioning quadrature `θ`.
pub fn gamma_average(
    sv: &SqueezedVacuumSpec,
    noise: &PhaseNoiseModel,
    theta: f64,
    eta: f64,
    r: f64,
) -> Result<Cov2> {
    check_efficiency(eta)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be finite and non-negative, got {r}")));
    }
    let eps = (-2.0 * r).exp();
    let [g11, g22, g12, _] = scaled_gamma(&phase_rule(noise, PHASE_NODES), sv, theta, eta, eps);
    Ok(Cov2::new(eps * g11, eps * g12, eps * g12, g22))
}

/// Limiting covariance matrix in the loss picture (what a detector of
/// efficiency `eta` sees), lab frame, at squeezing `r`.
fn limit_at(rule: &GaussRule, sv: &SqueezedVacuumSpec, theta: f64, eta: f64, r: f64) -> Result<Cov2> {
    let eps = (-2.0 * r).exp();
    let [g11, g22, g12, h22] = scaled_gamma(rule, sv, theta, eta, eps);
    let delta = g11 * g22 - eps * g12 * g12;
    if !(delta > 0.0) {
        return Err(Error::IllConditioned(format!(
            "scaled Γ determinant {delta:e} at r={r}, theta={theta}"
        )));
    }
    let xx = (g22 * (1.0 - 0.5 * eps * g11) + 0.5 * eps * eps * g12 * g12) / delta;
    let pp = (g11 * h22 + 0.5 * g12 * g12) / delta;
    let xp = -g12 / delta;
    Ok(cov::rotate(&Cov2::new(xx, xp, xp, pp), theta))
}

/// Limit for conditioning quadrature `θ` and detector efficiency `eta`.
///
/// With `verify_eta = Some(η_v)` the result is the state as observed by a
/// detector of efficiency `η_v`; with `None` the loss is formally undone,
/// which may produce an unphysical matrix (reported as a caveat).
pub fn asymptotic_general(
    sv: &SqueezedVacuumSpec,
    noise: &PhaseNoiseModel,
    theta: f64,
    eta: f64,
    verify_eta: Option<f64>,
    r_schedule: &[f64],
) -> Result<AsymptoticResult> {
    check_efficiency(eta)?;
    if let Some(ev) = verify_eta {
        check_efficiency(ev)?;
    }
    if r_schedule.len() < 2 {
        return Err(Error::param("r_schedule", "need at least two squeezing values"));
    }
    if r_schedule.windows(2).any(|w| !(w[1] > w[0])) || r_schedule[0] < 0.0 {
        return Err(Error::param("r_schedule", "must be non-negative and strictly increasing"));
    }
    let rule = phase_rule(noise, PHASE_NODES);
    let values = r_schedule
        .iter()
        .map(|&r| limit_at(&rule, sv, theta, eta, r))
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).amax()).collect();
    for (i, pair) in gaps.windows(2).enumerate() {
        // below ~1e-13 the gaps are rounding noise and need not shrink
        if pair[1] > pair[0] && pair[1] > 1e-13 {
            log::warn!(
                "squeezing schedule not monotone: gap {:e} after {:e} at r={}",
                pair[1],
                pair[0],
                r_schedule[i + 2]
            );
        }
    }
    let gap = *gaps.last().expect("schedule has two points");
    if gap > GAP_TOLERANCE {
        return Err(Error::NotConverged {
            what: format!("squeezing schedule up to r={}", r_schedule[r_schedule.len() - 1]),
            change: gap,
            tolerance: GAP_TOLERANCE,
        });
    }

    let fine = limit_at(&phase_rule(noise, 2 * PHASE_NODES), sv, theta, eta, *r_schedule.last().unwrap())?;
    let last = *values.last().unwrap();
    let change = (fine - last).amax();
    if change > QUADRATURE_TOLERANCE * last.amax() {
        return Err(Error::NotConverged {
            what: format!("phase average at sigma={}", noise.sigma),
            change,
            tolerance: QUADRATURE_TOLERANCE * last.amax(),
        });
    }

    let physical = cov::inverse_attenuate(&last, eta);
    let sigma = match verify_eta {
        Some(ev) => cov::attenuate(&physical, ev),
        None => physical,
    };
    Ok(AsymptoticResult::from_sigma(
        sigma,
        verify_eta.is_some(),
        verify_eta,
        *r_schedule.last().unwrap(),
        gap,
    ))
}
