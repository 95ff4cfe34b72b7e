// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space states and the single-mode channels acting on them.
//!
//! Quadratures follow `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, so the vacuum
//! has variance 1/2 in every direction.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Traces that fall short of one by more than this attach a truncation
/// warning to the state label.
pub const TRUNCATION_WARNING: f64 = 1e-9;

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// A single-mode density matrix truncated at photon number `cutoff`.
///
/// The trace may be below one: after conditioning it carries the success
/// probability of the measurement record that produced the state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    cutoff: usize,
    elements: DMatrix<Complex64>,
    pub label: String,
}

impl FockDensityMatrix {
    pub fn new(elements: DMatrix<Complex64>, label: impl Into<String>) -> Result<Self> {
        if elements.nrows() != elements.ncols() || elements.nrows() == 0 {
            return Err(Error::param(
                "elements",
                format!("expected a non-empty square matrix, got {}x{}", elements.nrows(), elements.ncols()),
            ));
        }
        Ok(Self {
            cutoff: elements.nrows() - 1,
            elements,
            label: label.into(),
        })
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            elements: DMatrix::zeros(cutoff + 1, cutoff + 1),
            label: String::new(),
        }
    }

    /// The projector `|n⟩⟨n|`.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::param("n", format!("{n} exceeds cutoff {cutoff}")));
        }
        let mut rho = Self::zeros(cutoff);
        rho.elements[(n, n)] = Complex64::new(1.0, 0.0);
        rho.label = format!("fock({n})");
        Ok(rho)
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut rho = Self::zeros(cutoff);
        rho.elements[(0, 0)] = Complex64::new(1.0, 0.0);
        rho.label = "vacuum".into();
        rho
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn into_elements(self) -> DMatrix<Complex64> {
        self.elements
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.elements[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.elements[(k, k)].re).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            cutoff: self.cutoff,
            elements: self.elements.map(|z| z * c),
            label: self.label.clone(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr < 1e-300 {
            return Err(Error::DegenerateState {
                trace: tr,
                threshold: 1e-300,
            });
        }
        Ok(self.scaled(1.0 / tr))
    }

    /// Largest `|ρ[m][n] − conj(ρ[n][m])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in 0..d {
            for n in m..d {
                worst = worst.max((self.elements[(m, n)] - self.elements[(n, m)].conj()).norm());
            }
        }
        worst
    }

    /// Largest modulus among elements with `m − n` odd.
    pub fn odd_parity_magnitude(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in 0..d {
            for n in 0..d {
                if (m + n) % 2 == 1 {
                    worst = worst.max(self.elements[(m, n)].norm());
                }
            }
        }
        worst
    }

    /// True when every element with `m − n` odd is exactly zero.
    pub fn has_even_support(&self) -> bool {
        self.odd_parity_magnitude() == 0.0
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.elements + self.elements.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Photon-number population `ρ[n][n]`.
    pub fn population(&self, n: usize) -> f64 {
        self.elements[(n, n)].re
    }

    /// Checks Hermiticity, positivity and the trace bound.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if !(tr > 0.0 && tr <= 1.0 + 1e-12) {
            return Err(Error::param("trace", format!("{tr} outside (0, 1]")));
        }
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::param("elements", format!("not Hermitian (error {herm:e})")));
        }
        let min = self.eigenvalues()[0];
        if min < -1e-10 * tr {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        Ok(())
    }

    pub(crate) fn from_parts(cutoff: usize, elements: DMatrix<Complex64>, label: String) -> Self {
        debug_assert_eq!(elements.nrows(), cutoff + 1);
        Self {
            cutoff,
            elements,
            label,
        }
    }

    pub(crate) fn note_truncation(&mut self, deficit: f64) {
        if deficit > TRUNCATION_WARNING {
            log::warn!("{}: truncation deficit {deficit:e} at cutoff {}", self.label, self.cutoff);
            self.label
                .push_str(&format!(" [truncation warning: deficit {deficit:.3e}]"));
        }
    }
}

/// Quadrature variances of a centred Gaussian state with diagonal
/// covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedVacuumSpec {
    pub vx: f64,
    pub vp: f64,
}

impl SqueezedVacuumSpec {
    pub fn new(vx: f64, vp: f64) -> Result<Self> {
        if !(vx > 0.0 && vx.is_finite()) {
            return Err(Error::param("vx", format!("must be positive, got {vx}")));
        }
        if !(vp > 0.0 && vp.is_finite()) {
            return Err(Error::param("vp", format!("must be positive, got {vp}")));
        }
        if vx * vp < 0.25 - 1e-12 {
            return Err(Error::Unphysical { det: vx * vp });
        }
        Ok(Self { vx, vp })
    }

    /// `1 / (2√(Vx·Vp))`.
    pub fn purity(&self) -> f64 {
        0.5 / (self.vx * self.vp).sqrt()
    }

    /// Variance along `x cos φ + p sin φ`.
    pub fn variance_at(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.vx * c * c + self.vp * s * s
    }
}

/// Gaussian distribution of random phase shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseNoiseModel {
    pub sigma: f64,
}

impl PhaseNoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be non-negative, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    /// Characteristic function `f_n = exp(−n²σ²/2)`.
    pub fn fourier(&self, n: i64) -> f64 {
        let n = n as f64;
        (-0.5 * n * n * self.sigma * self.sigma).exp()
    }

    /// Dephased x-variance: the average of `Vx cos²φ + Vp sin²φ`.
    pub fn dephased_variance_x(&self, spec: &SqueezedVacuumSpec) -> f64 {
        let f2 = self.fourier(2);
        0.5 * (1.0 + f2) * spec.vx + 0.5 * (1.0 - f2) * spec.vp
    }

    pub fn dephased_variance_p(&self, spec: &SqueezedVacuumSpec) -> f64 {
        let f2 = self.fourier(2);
        0.5 * (1.0 - f2) * spec.vx + 0.5 * (1.0 + f2) * spec.vp
    }
}

/// Fock-basis matrix of the centred Gaussian state with covariance
/// `diag(Vx, Vp)`, obtained from the Q-function generating function.
///
/// Pure and mixed (`Vx·Vp > 1/4`) states are both covered. Elements with
/// `m + n` odd vanish.
pub fn squeezed_vacuum_dm(spec: &SqueezedVacuumSpec, cutoff: usize) -> FockDensityMatrix {
    let tvx = spec.vx + 0.5;
    let tvp = spec.vp + 0.5;
    // u ≥ 0 for every physical state, so the sum below never cancels
    let u = (1.0 - 0.5 / tvx - 0.5 / tvp).max(0.0);
    let t = 0.25 / tvx - 0.25 / tvp;
    let lnf = ln_factorials(cutoff);
    let ln_norm = -0.5 * (tvx * tvp).ln();

    let d = cutoff + 1;
    let mut elements = DMatrix::<Complex64>::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            if (m + n) % 2 == 1 {
                continue;
            }
            let k = (m as i64 - n as i64) / 2;
            let a_min = (-k).max(0) as usize;
            let a_max = n / 2;
            let mut sum = 0.0;
            for a in a_min..=a_max {
                let t_pow = (k + 2 * a as i64) as i32;
                let u_pow = (n - 2 * a) as i32;
                let powers = (-t).powi(t_pow) * u.powi(u_pow);
                if powers == 0.0 {
                    continue;
                }
                let ln_fact = lnf[a] + lnf[n - 2 * a] + lnf[(a as i64 + k) as usize];
                sum += powers * (0.5 * (lnf[m] + lnf[n]) + ln_norm - ln_fact).exp();
            }
            elements[(m, n)] = Complex64::new(sum, 0.0);
        }
    }
    let mut rho = FockDensityMatrix::from_parts(
        cutoff,
        elements,
        format!("gaussian(vx={}, vp={})", spec.vx, spec.vp),
    );
    let deficit = 1.0 - rho.trace();
    rho.note_truncation(deficit);
    rho
}

/// Averages the state over Gaussian random phase shifts: `ρ[m][n] ← f_{m−n} ρ[m][n]`.
pub fn dephase(rho: &FockDensityMatrix, noise: &PhaseNoiseModel) -> FockDensityMatrix {
    let d = rho.dim();
    let factors: Vec<f64> = (0..d as i64).map(|k| noise.fourier(k)).collect();
    let elements = DMatrix::from_fn(d, d, |m, n| rho.elements[(m, n)] * factors[m.abs_diff(n)]);
    FockDensityMatrix::from_parts(
        rho.cutoff,
        elements,
        format!("{} | dephase(sigma={})", rho.label, noise.sigma),
    )
}

/// Rotates the state in phase space by `theta`: `ρ[m][n] ← e^{i(m−n)θ} ρ[m][n]`,
/// which conjugates the covariance matrix by the rotation `R(θ)`.
pub fn phase_rotate(rho: &FockDensityMatrix, theta: f64) -> FockDensityMatrix {
    let d = rho.dim();
    let elements = DMatrix::from_fn(d, d, |m, n| {
        rho.elements[(m, n)] * Complex64::from_polar(1.0, (m as f64 - n as f64) * theta)
    });
    FockDensityMatrix::from_parts(rho.cutoff, elements, format!("{} | rotate({theta})", rho.label))
}

/// Loss amplitudes `B[m][a] = √C(m,a) · η^{(m−a)/2} (1−η)^{a/2}` for `a ≤ m ≤ cutoff`.
pub(crate) fn loss_amplitudes(cutoff: usize, eta: f64) -> Vec<Vec<f64>> {
    let lnf = ln_factorials(cutoff);
    (0..=cutoff)
        .map(|m| {
            (0..=m)
                .map(|a| {
                    if eta == 1.0 {
                        return if a == 0 { 1.0 } else { 0.0 };
                    }
                    let ln_binom = lnf[m] - lnf[a] - lnf[m - a];
                    let ln_b = 0.5 * ln_binom
                        + 0.5 * (m - a) as f64 * eta.ln()
                        + 0.5 * a as f64 * (1.0 - eta).ln();
                    ln_b.exp()
                })
                .collect()
        })
        .collect()
}

pub(crate) fn check_efficiency(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("eta", format!("must lie in (0, 1], got {eta}")))
    }
}

/// Pure loss channel with transmittance `eta` (beamsplitter against vacuum).
pub fn attenuate(rho: &FockDensityMatrix, eta: f64) -> Result<FockDensityMatrix> {
    check_efficiency(eta)?;
    let d = rho.dim();
    let label = format!("{} | attenuate(eta={eta})", rho.label);
    if eta == 1.0 {
        return Ok(FockDensityMatrix::from_parts(rho.cutoff, rho.elements.clone(), label));
    }
    let b = loss_amplitudes(rho.cutoff, eta);
    let elements = DMatrix::from_fn(d, d, |m, n| {
        let top = d - m.max(n);
        (0..top).fold(Complex64::zero(), |acc, a| {
            acc + rho.elements[(m + a, n + a)] * (b[m + a][a] * b[n + a][a])
        })
    });
    Ok(FockDensityMatrix::from_parts(rho.cutoff, elements, label))
}

/// Normalized Hermite functions `⟨x|k⟩` for `k = 0..=n`, by the stable
/// three-term recurrence.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Position-space wavefunction of the `n`-photon Fock state,
/// `π^{−1/4} (2ⁿ n!)^{−1/2} H_n(x) e^{−x²/2}`.
pub fn quadrature_wavefunction(n: usize, x: f64) -> f64 {
    hermite_functions(n, x)[n]
}

/// Balanced-beamsplitter coefficients for one conserved photon number `M`,
/// restricted to single-mode occupations `≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamsplitterBlock {
    pub total: usize,
    /// Smallest admissible first-mode occupation.
    pub lo: usize,
    pub len: usize,
    /// Row-major `len × len`; entry `[j1 − lo][m1 − lo]` is `A^{j1−m1}_{m1, M−m1}`.
    pub coeffs: Vec<f64>,
}

impl BeamsplitterBlock {
    #[inline]
    pub fn at(&self, j1: usize, m1: usize) -> f64 {
        self.coeffs[(j1 - self.lo) * self.len + (m1 - self.lo)]
    }
}

/// Photon-number-conserving amplitudes `|m1, m2⟩ → Σ_a A^a_{m1,m2} |m1+a, m2−a⟩`
/// of a balanced beamsplitter, grouped by total photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamsplitterTensor {
    cutoff: usize,
    blocks: Vec<BeamsplitterBlock>,
}

impl BeamsplitterTensor {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn blocks(&self) -> &[BeamsplitterBlock] {
        &self.blocks
    }

    pub fn block(&self, total: usize) -> &BeamsplitterBlock {
        &self.blocks[total]
    }

    /// `A^a_{m1,m2}`, zero when any occupation leaves `[0, cutoff]`.
    pub fn coeff(&self, m1: usize, m2: usize, a: i64) -> f64 {
        let j1 = m1 as i64 + a;
        let j2 = m2 as i64 - a;
        let c = self.cutoff as i64;
        if m1 > self.cutoff || m2 > self.cutoff || j1 < 0 || j2 < 0 || j1 > c || j2 > c {
            return 0.0;
        }
        self.blocks[m1 + m2].at(j1 as usize, m1)
    }
}

/// Builds the balanced-beamsplitter tensor up to `cutoff` from the closed-form
/// double-factorial sum.
///
/// The alternating sum over `d` is carried out exactly: multiplying each term
/// by `M!` turns it into a signed multinomial coefficient, so the sum is an
/// integer and only the final scaling is done in floating point.
pub fn bs_tensor(cutoff: usize) -> BeamsplitterTensor {
    let max_total = 2 * cutoff;
    let binom = binomial_table(max_total);
    let lnf = ln_factorials(max_total);

    let blocks = (0..=max_total)
        .map(|total| {
            let lo = total.saturating_sub(cutoff);
            let hi = total.min(cutoff);
            let len = hi - lo + 1;
            let mut coeffs = vec![0.0; len * len];
            for m1 in lo..=hi {
                let m2 = total - m1;
                for j1 in lo..=hi {
                    let a = j1 as i64 - m1 as i64;
                    coeffs[(j1 - lo) * len + (m1 - lo)] =
                        bs_coefficient_exact(m1, m2, a, &binom, &lnf);
                }
            }
            BeamsplitterBlock {
                total,
                lo,
                len,
                coeffs,
            }
        })
        .collect();
    BeamsplitterTensor { cutoff, blocks }
}

fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = Vec::with_capacity(i + 1);
        for j in 0..=i {
            if j == 0 || j == i {
                row.push(BigInt::from(1));
            } else {
                row.push(&rows[i - 1][j - 1] + &rows[i - 1][j]);
            }
        }
        rows.push(row);
    }
    rows
}

fn bs_coefficient_exact(m1: usize, m2: usize, a: i64, binom: &[Vec<BigInt>], lnf: &[f64]) -> f64 {
    let total = m1 + m2;
    let j1 = m1 as i64 + a;
    let j2 = m2 as i64 - a;
    if j1 < 0 || j2 < 0 {
        return 0.0;
    }
    // d ranges over all integers keeping d, d+a, m1−d, m2−d−a non-negative
    let d_min = 0.max(-a);
    let d_max = (m1 as i64).min(m2 as i64 - a);
    let mut sum = BigInt::zero();
    for d in d_min..=d_max {
        let du = d as usize;
        let da = (d + a) as usize;
        let multinomial =
            &binom[total][du] * &binom[total - du][da] * &binom[total - du - da][m1 - du];
        if (d + a).rem_euclid(2) == 0 {
            sum += multinomial;
        } else {
            sum -= multinomial;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let scale = 0.5 * (lnf[m1] + lnf[m2] + lnf[j1 as usize] + lnf[j2 as usize])
        - 0.5 * total as f64 * LN_2
        - lnf[total];
    sum.to_f64().unwrap_or(f64::NAN) * scale.exp()
}

/// Direct floating-point evaluation of the closed-form amplitude. Loses
/// accuracy through cancellation above `m1 + m2 ≈ 30`; kept for comparison.
pub fn bs_coefficient_float(m1: usize, m2: usize, a: i64) -> f64 {
    let j1 = m1 as i64 + a;
    let j2 = m2 as i64 - a;
    if j1 < 0 || j2 < 0 {
        return 0.0;
    }
    let lnf = ln_factorials(m1 + m2);
    let pre = 0.5 * (lnf[m1] + lnf[m2]) - 0.5 * (m1 + m2) as f64 * LN_2;
    let d_min = 0.max(-a);
    let d_max = (m1 as i64).min(m2 as i64 - a);
    (d_min..=d_max)
        .map(|d| {
            let sign = if (d + a).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let ln_term = 0.5 * (lnf[j1 as usize] + lnf[j2 as usize])
                - lnf[d as usize]
                - lnf[(d + a) as usize]
                - lnf[(m1 as i64 - d) as usize]
                - lnf[(m2 as i64 - d - a) as usize];
            sign * (pre + ln_term).exp()
        })
        .sum()
}
