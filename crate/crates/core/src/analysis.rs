// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Diagnostics of Fock-basis states: quadrature moments, purity, and
//! fidelity with the moment-matched Gaussian state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cov::{self, Cov2};
use crate::error::{Error, Result};
use crate::fock::{phase_rotate, squeezed_vacuum_dm, FockDensityMatrix, SqueezedVacuumSpec};

/// States with trace below this are treated as empty.
pub const MIN_TRACE: f64 = 1e-12;

/// First and second moments of the quadratures of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments {
    pub vx: f64,
    pub vp: f64,
    /// Symmetrized covariance `⟨{Δx, Δp}⟩/2`.
    pub cxp: f64,
    pub mx: f64,
    pub mp: f64,
}

impl GaussianMoments {
    pub fn cov(&self) -> Cov2 {
        Cov2::new(self.vx, self.cxp, self.cxp, self.vp)
    }

    /// Variance of `x cos θ + p sin θ`.
    pub fn variance_at(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.vx * c * c + self.vp * s * s + 2.0 * self.cxp * s * c
    }
}

fn normalization(rho: &FockDensityMatrix) -> Result<f64> {
    let tr = rho.trace();
    if tr < MIN_TRACE {
        return Err(Error::DegenerateState {
            trace: tr,
            threshold: MIN_TRACE,
        });
    }
    Ok(tr)
}

/// Quadrature moments of `ρ / Tr ρ` from the ladder expectations
/// `⟨a⟩ = Σ √n ρ[n][n−1]`, `⟨a²⟩` and `⟨a†a⟩`.
pub fn covariance_matrix(rho: &FockDensityMatrix) -> Result<GaussianMoments> {
    let tr = normalization(rho)?;
    let e = rho.elements();
    let d = rho.dim();
    let mut a1 = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut num = 0.0;
    for n in 0..d {
        let nf = n as f64;
        num += nf * e[(n, n)].re;
        if n >= 1 {
            a1 += e[(n, n - 1)] * nf.sqrt();
        }
        if n >= 2 {
            a2 += e[(n, n - 2)] * (nf * (nf - 1.0)).sqrt();
        }
    }
    a1 /= tr;
    a2 /= tr;
    num /= tr;
    let mx = std::f64::consts::SQRT_2 * a1.re;
    let mp = std::f64::consts::SQRT_2 * a1.im;
    Ok(GaussianMoments {
        vx: a2.re + num + 0.5 - mx * mx,
        vp: -a2.re + num + 0.5 - mp * mp,
        cxp: a2.im - mx * mp,
        mx,
        mp,
    })
}

/// Variance of `q(θ)` as seen by a homodyne detector of efficiency
/// `verify_eta`, i.e. `η_v V + (1 − η_v)/2`.
pub fn quadrature_variance(rho: &FockDensityMatrix, theta: f64, verify_eta: f64) -> Result<f64> {
    crate::fock::check_efficiency(verify_eta)?;
    let v = covariance_matrix(rho)?.variance_at(theta);
    Ok(verify_eta * v + 0.5 * (1.0 - verify_eta))
}

/// `Tr[ρ²] / (Tr ρ)²`.
pub fn purity(rho: &FockDensityMatrix) -> Result<f64> {
    let tr = normalization(rho)?;
    let sq: f64 = rho.elements().iter().map(|z| z.norm_sqr()).sum();
    Ok(sq / (tr * tr))
}

/// The unnormalized trace, i.e. the probability of the conditioning record.
pub fn success_probability(rho: &FockDensityMatrix) -> f64 {
    rho.trace()
}

/// Zero-mean Gaussian state with the same covariance matrix as `rho`.
pub fn gaussian_reference(rho: &FockDensityMatrix) -> Result<FockDensityMatrix> {
    let moments = covariance_matrix(rho)?;
    gaussian_from_moments(&moments, rho.cutoff())
}

/// Fock matrix of the centred Gaussian state with covariance `moments.cov()`.
pub fn gaussian_from_moments(moments: &GaussianMoments, cutoff: usize) -> Result<FockDensityMatrix> {
    if moments.mx.abs() > 1e-8 || moments.mp.abs() > 1e-8 {
        return Err(Error::NonzeroMean {
            mx: moments.mx,
            mp: moments.mp,
        });
    }
    let (theta, l1, mut l2) = cov::principal_axes(&moments.cov());
    let det = l1 * l2;
    if !(l1 > 0.0 && l2 > 0.0) || det < 0.25 - 1e-6 {
        return Err(Error::Unphysical { det });
    }
    if det < 0.25 {
        // truncation noise below the uncertainty bound: snap to a pure state
        l2 = 0.25 / l1;
    }
    let spec = SqueezedVacuumSpec::new(l1, l2)?;
    let mut reference = phase_rotate(&squeezed_vacuum_dm(&spec, cutoff), theta);
    reference.label = format!("gaussian_reference(vx={}, vp={}, cxp={})", moments.vx, moments.vp, moments.cxp);
    Ok(reference)
}

/// Eigenvalues below this are rounding noise of a diagonalization and are
/// treated as zero before taking square roots.
fn noise_floor(eigenvalues: &[f64]) -> f64 {
    let largest = eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    4.0 * eigenvalues.len() as f64 * f64::EPSILON * largest
}

fn checked_root(l: f64, floor: f64, tol: f64) -> Result<f64> {
    if l < -tol {
        return Err(Error::NotPositive { eigenvalue: l });
    }
    Ok(if l > floor { l.sqrt() } else { 0.0 })
}

/// Hermitian square root, clamping eigenvalues in `[−tol, 0)` to zero.
fn sqrt_psd(m: &DMatrix<Complex64>, tol: f64) -> Result<DMatrix<Complex64>> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let floor = noise_floor(&values);
    let mut roots = Vec::with_capacity(values.len());
    for &l in &values {
        roots.push(Complex64::new(checked_root(l, floor, tol)?, 0.0));
    }
    let v = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * roots[j]);
    Ok(scaled * v.adjoint())
}

/// Uhlmann fidelity `(Tr |√ρ₁ √ρ₂|)²` of the normalized states.
pub fn uhlmann_fidelity(rho1: &FockDensityMatrix, rho2: &FockDensityMatrix) -> Result<f64> {
    if rho1.cutoff() != rho2.cutoff() {
        return Err(Error::CutoffMismatch {
            left: rho1.cutoff(),
            right: rho2.cutoff(),
        });
    }
    let tol = 1e-8;
    let r1 = rho1.elements() / Complex64::new(normalization(rho1)?, 0.0);
    let r2 = rho2.elements() / Complex64::new(normalization(rho2)?, 0.0);
    // singular values of √ρ₁√ρ₂ are resolved to absolute accuracy ε, where
    // square roots of the eigenvalues of √ρ₂ρ₁√ρ₂ would only reach √ε
    let product = sqrt_psd(&r1, tol)? * sqrt_psd(&r2, tol)?;
    let root_sum: f64 = product.singular_values().iter().sum();
    Ok(root_sum * root_sum)
}

/// Fidelity of `rho` with its moment-matched Gaussian reference. The
/// reference must fit in the cutoff to within `1e-6` of unit trace.
pub fn gaussian_fidelity(rho: &FockDensityMatrix) -> Result<f64> {
    let reference = gaussian_reference(rho)?;
    let deficit = 1.0 - reference.trace();
    if deficit > 1e-6 {
        return Err(Error::Truncation {
            what: "gaussian reference",
            deficit,
            tolerance: 1e-6,
        });
    }
    uhlmann_fidelity(rho, &reference)
}

/// `½ Σ |λ_i(ρ₁ − ρ₂)|` of the normalized states.
pub fn trace_distance(rho1: &FockDensityMatrix, rho2: &FockDensityMatrix) -> Result<f64> {
    if rho1.cutoff() != rho2.cutoff() {
        return Err(Error::CutoffMismatch {
            left: rho1.cutoff(),
            right: rho2.cutoff(),
        });
    }
    let diff = rho1.elements() / Complex64::new(normalization(rho1)?, 0.0)
        - rho2.elements() / Complex64::new(normalization(rho2)?, 0.0);
    let h = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(0.5 * h.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{dephase, PhaseNoiseModel};

    fn gaussian(vx: f64, vp: f64, cutoff: usize) -> FockDensityMatrix {
        squeezed_vacuum_dm(&SqueezedVacuumSpec::new(vx, vp).unwrap(), cutoff)
    }

    #[test]
    fn vacuum_moments() {
        let m = covariance_matrix(&FockDensityMatrix::vacuum(5)).unwrap();
        assert!((m.vx - 0.5).abs() < 1e-15 && (m.vp - 0.5).abs() < 1e-15);
        assert_eq!(m.cxp, 0.0);
        for theta in [0.0, 0.4, 2.0] {
            let v = quadrature_variance(&FockDensityMatrix::vacuum(5), theta, 1.0).unwrap();
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_state_rejected() {
        let z = FockDensityMatrix::zeros(4);
        assert!(matches!(covariance_matrix(&z), Err(Error::DegenerateState { .. })));
        assert!(purity(&z).is_err());
    }

    #[test]
    fn purity_values() {
        let rho = gaussian(0.2, 2.0, 40);
        let p = purity(&rho).unwrap();
        assert!((p - 0.5 / 0.4f64.sqrt()).abs() < 1e-8, "{p}");
        assert!((p - 0.790569).abs() < 1e-6);
        let half_vac = FockDensityMatrix::vacuum(3).scaled(0.5);
        assert!((purity(&half_vac).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_basics() {
        let v = FockDensityMatrix::vacuum(6);
        let one = FockDensityMatrix::fock(1, 6).unwrap();
        assert!((uhlmann_fidelity(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!(uhlmann_fidelity(&v, &one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fidelity_with_vacuum_is_ground_population() {
        let rho = gaussian(0.2, 2.0, 40);
        let v = FockDensityMatrix::vacuum(40);
        let f = uhlmann_fidelity(&v, &rho).unwrap();
        let f_rev = uhlmann_fidelity(&rho, &v).unwrap();
        let expect = rho.get(0, 0).re / rho.trace();
        assert!((f - expect).abs() < 1e-10, "{f} vs {expect}");
        assert!((f - f_rev).abs() < 1e-8);
    }

    #[test]
    fn reference_is_idempotent_on_gaussians() {
        let rho = gaussian(0.2, 2.0, 40);
        let r = gaussian_reference(&rho).unwrap();
        let diff = (r.elements() - rho.elements()).camax();
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn reference_of_dephased_state() {
        let noise = PhaseNoiseModel::new(0.5).unwrap();
        let spec = SqueezedVacuumSpec::new(0.2, 2.0).unwrap();
        let rho = dephase(&gaussian(0.2, 2.0, 40), &noise);
        let r = gaussian_reference(&rho).unwrap();
        let m = covariance_matrix(&r).unwrap();
        assert!((m.vx - noise.dephased_variance_x(&spec)).abs() < 1e-6);
        assert!((m.vp - noise.dephased_variance_p(&spec)).abs() < 1e-6);
        assert!(gaussian_fidelity(&rho).unwrap() < 1.0 - 1e-4);
        assert!((gaussian_fidelity(&gaussian(0.2, 2.0, 40)).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn nonzero_mean_rejected() {
        // (|0⟩ + |1⟩)/√2 has ⟨x⟩ = 1/√2
        let mut m = DMatrix::<Complex64>::from_element(2, 2, Complex64::new(0.5, 0.0));
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        let rho = FockDensityMatrix::new(m, "coherent-ish").unwrap();
        assert!(matches!(gaussian_reference(&rho), Err(Error::NonzeroMean { .. })));
    }
}
