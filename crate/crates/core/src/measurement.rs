// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! POVM elements for windowed homodyne conditioning `|q(θ)| ≤ X`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{check_efficiency, hermite_functions, loss_amplitudes, FockDensityMatrix};
use crate::quadrature::GaussRule;

/// Acceptance window on the measured quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// Accept `|q| ≤ X`.
    HalfWidth(f64),
    /// Accept every outcome.
    Infinite,
}

/// Which quadrature the detector records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    /// `q(θ) = x cos θ + p sin θ`.
    Angle(f64),
    /// Local-oscillator phase uniformly random.
    Randomized,
}

/// A conditioning POVM element `0 ≤ C ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodynePOVM {
    cutoff: usize,
    pub window: Window,
    pub eta: f64,
    pub quadrature: Quadrature,
    elements: DMatrix<Complex64>,
}

/// Gauss–Legendre node count used for a window at a given cutoff.
pub fn window_nodes(cutoff: usize, integration_half_width: f64) -> usize {
    64usize
        .max(4 * cutoff)
        .max((8.0 * integration_half_width).ceil() as usize)
}

/// Beyond this distance every `⟨x|n⟩` with `n ≤ cutoff` is below double
/// precision, so wider windows are integrated only up to here.
fn support_radius(cutoff: usize) -> f64 {
    (2.0 * cutoff as f64 + 1.0).sqrt() + 10.0
}

impl HomodynePOVM {
    /// Ideal detector, `x` quadrature, window `|x| ≤ half_width`:
    /// `C[m][n] = ∫_{−X}^{X} ⟨m|x⟩⟨x|n⟩ dx`.
    pub fn window(half_width: f64, cutoff: usize) -> Result<Self> {
        if !(half_width > 0.0) || half_width.is_nan() {
            return Err(Error::param(
                "window",
                format!("half-width must be positive, got {half_width}"),
            ));
        }
        if half_width.is_infinite() {
            return Ok(Self::identity(cutoff));
        }
        let d = cutoff + 1;
        let upper = half_width.min(support_radius(cutoff));
        // even integrand for m + n even: integrate [0, X] and double
        let rule = GaussRule::legendre_on(window_nodes(cutoff, upper), 0.0, upper);
        let mut elements = DMatrix::<Complex64>::zeros(d, d);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let psi = hermite_functions(cutoff, x);
            for m in 0..d {
                let wm = 2.0 * w * psi[m];
                for n in (m % 2..=m).step_by(2) {
                    elements[(m, n)].re += wm * psi[n];
                }
            }
        }
        for m in 0..d {
            for n in m + 1..d {
                elements[(m, n)] = elements[(n, m)];
            }
        }
        Ok(Self {
            cutoff,
            window: Window::HalfWidth(half_width),
            eta: 1.0,
            quadrature: Quadrature::Angle(0.0),
            elements,
        })
    }

    /// The trivial element `C = I`.
    pub fn identity(cutoff: usize) -> Self {
        Self {
            cutoff,
            window: Window::Infinite,
            eta: 1.0,
            quadrature: Quadrature::Angle(0.0),
            elements: DMatrix::identity(cutoff + 1, cutoff + 1),
        }
    }

    /// Window, efficiency and quadrature in one go.
    pub fn conditioning(
        window: Window,
        eta: f64,
        quadrature: Quadrature,
        cutoff: usize,
    ) -> Result<Self> {
        let base = match window {
            Window::HalfWidth(x) => Self::window(x, cutoff)?,
            Window::Infinite => Self::identity(cutoff),
        };
        let lossy = base.with_efficiency(eta)?;
        Ok(match quadrature {
            Quadrature::Angle(theta) => lossy.rotated(theta),
            Quadrature::Randomized => lossy.randomized(),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.elements[(m, n)]
    }

    /// Detector inefficiency modelled as loss `eta` before an ideal detector:
    /// `C(η)[m][n] = Σ_a B[m][a] B[n][a] C[m−a][n−a]`.
    pub fn with_efficiency(&self, eta: f64) -> Result<Self> {
        check_efficiency(eta)?;
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let d = self.cutoff + 1;
        let b = loss_amplitudes(self.cutoff, eta);
        let elements = DMatrix::from_fn(d, d, |m, n| {
            (0..=m.min(n)).fold(Complex64::new(0.0, 0.0), |acc, a| {
                acc + self.elements[(m - a, n - a)] * (b[m][a] * b[n][a])
            })
        });
        Ok(Self {
            elements,
            eta: self.eta * eta,
            ..self.clone()
        })
    }

    /// Conditioning on `q(θ)` instead: `C[m][n] ← C[m][n] e^{i(m−n)θ}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let d = self.cutoff + 1;
        let elements = DMatrix::from_fn(d, d, |m, n| {
            self.elements[(m, n)] * Complex64::from_polar(1.0, (m as f64 - n as f64) * theta)
        });
        let quadrature = match self.quadrature {
            Quadrature::Angle(a) => Quadrature::Angle(a + theta),
            Quadrature::Randomized => Quadrature::Randomized,
        };
        Self {
            elements,
            quadrature,
            ..self.clone()
        }
    }

    /// Phase-randomized detection keeps only the diagonal.
    pub fn randomized(&self) -> Self {
        let d = self.cutoff + 1;
        let elements = DMatrix::from_fn(d, d, |m, n| {
            if m == n {
                self.elements[(m, n)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self {
            elements,
            quadrature: Quadrature::Randomized,
            ..self.clone()
        }
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.elements + self.elements.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Checks `0 ≤ C ≤ I` and Hermiticity to `1e-10`.
    pub fn validate(&self) -> Result<()> {
        let herm = (&self.elements - self.elements.adjoint()).camax();
        if herm > 1e-10 {
            return Err(Error::param("povm", format!("not Hermitian (error {herm:e})")));
        }
        let ev = self.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -1e-10 {
            return Err(Error::NotPositive { eigenvalue: lo });
        }
        if hi > 1.0 + 1e-10 {
            return Err(Error::param("povm", format!("eigenvalue {hi} exceeds one")));
        }
        Ok(())
    }
}

/// `Re Tr[ρ C]`.
pub fn acceptance_probability(rho: &FockDensityMatrix, povm: &HomodynePOVM) -> Result<f64> {
    if rho.cutoff() != povm.cutoff() {
        return Err(Error::CutoffMismatch {
            left: rho.cutoff(),
            right: povm.cutoff(),
        });
    }
    let r = rho.elements();
    let c = povm.elements();
    let d = rho.dim();
    let mut acc = 0.0;
    for m in 0..d {
        for n in 0..d {
            acc += (r[(m, n)] * c[(n, m)]).re;
        }
    }
    Ok(acc)
}
