// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Single-mode covariance-matrix algebra in the `(x, p)` ordering.

use nalgebra::Matrix2;

pub type Cov2 = Matrix2<f64>;

/// Phase-space rotation `[[cos, −sin], [sin, cos]]`.
pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// `R(θ) Σ R(θ)ᵀ`.
pub fn rotate(sigma: &Cov2, theta: f64) -> Cov2 {
    let r = rotation(theta);
    r * sigma * r.transpose()
}

/// Loss with transmittance `eta`: `ηΣ + (1−η)/2 · I`.
pub fn attenuate(sigma: &Cov2, eta: f64) -> Cov2 {
    sigma * eta + Cov2::identity() * (0.5 * (1.0 - eta))
}

/// Formal inverse of [`attenuate`]: `(Σ − (1−η)/2 · I)/η`. Generally not a
/// physical covariance matrix.
pub fn inverse_attenuate(sigma: &Cov2, eta: f64) -> Cov2 {
    (sigma - Cov2::identity() * (0.5 * (1.0 - eta))) / eta
}

/// Purity `1/(2√det Σ)` of a Gaussian state.
pub fn purity(sigma: &Cov2) -> f64 {
    0.5 / sigma.determinant().sqrt()
}

/// Angle `θ*` and eigenvalues `(λ1, λ2)` with `Σ = R(θ*) diag(λ1, λ2) R(θ*)ᵀ`.
pub fn principal_axes(sigma: &Cov2) -> (f64, f64, f64) {
    let (vx, vp, c) = (sigma[(0, 0)], sigma[(1, 1)], sigma[(0, 1)]);
    let theta = 0.5 * (2.0 * c).atan2(vx - vp);
    let d = rotate(sigma, -theta);
    (theta, d[(0, 0)], d[(1, 1)])
}
