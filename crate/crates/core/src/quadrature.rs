// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Legendre and Gauss–Hermite rules.
//!
//! Legendre nodes come from Newton iteration on the three-term recurrence.
//! Hermite nodes are seeded by the Golub–Welsch eigenvalues of the Jacobi
//! matrix and polished with Newton steps on the normalized Hermite
//! functions, so the weights stay representable for a few hundred nodes.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::fock::hermite_functions;

/// A one-dimensional quadrature rule `Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Gauss–Legendre rule on `[-1, 1]`.
    pub fn legendre(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Gauss–Legendre rule mapped onto `[a, b]`.
    pub fn legendre_on(n: usize, a: f64, b: f64) -> Self {
        let base = Self::legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Self {
            nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
            weights: base.weights.iter().map(|w| half * w).collect(),
        }
    }

    /// Gauss–Hermite rule for the weight `exp(-x²)` on the real line.
    pub fn hermite(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k, k - 1)] = off;
            jacobi[(k - 1, k)] = off;
        }
        let mut seeds: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        seeds.sort_by(|a, b| a.total_cmp(b));

        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for seed in seeds {
            let mut x = seed;
            for _ in 0..8 {
                let psi = hermite_functions(n, x);
                let deriv = (2.0 * n as f64).sqrt() * psi[n - 1] - x * psi[n];
                if deriv == 0.0 {
                    break;
                }
                let dx = psi[n] / deriv;
                x -= dx;
                if dx.abs() < 1e-15 * (1.0 + x.abs()) {
                    break;
                }
            }
            let psi = hermite_functions(n - 1, x);
            let norm: f64 = psi.iter().map(|v| v * v).sum();
            nodes.push(x);
            weights.push((-x * x).exp() / norm);
        }
        // exact symmetry
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Rule for expectations over a centred normal distribution with
    /// standard deviation `sigma`: `E[f(φ)] ≈ Σ w_i f(φ_i)`, weights sum to 1.
    pub fn normal(n: usize, sigma: f64) -> Self {
        let base = Self::hermite(n);
        let scale = std::f64::consts::SQRT_2 * sigma;
        let norm = PI.sqrt();
        Self {
            nodes: base.nodes.iter().map(|u| scale * u).collect(),
            weights: base.weights.iter().map(|w| w / norm).collect(),
        }
    }

    /// Rule for expectations of π-periodic functions of a centred normal
    /// variable: midpoint nodes on one period weighted by the wrapped normal
    /// density. Converges geometrically for analytic integrands, unlike
    /// [`GaussRule::normal`], which loses accuracy when the integrand has
    /// nearby complex singularities. `sigma = 0` gives a single node at 0.
    pub fn periodic_normal(n: usize, sigma: f64) -> Self {
        assert!(n > 0, "rule needs at least one node");
        if sigma == 0.0 {
            return Self {
                nodes: vec![0.0],
                weights: vec![1.0],
            };
        }
        let h = PI / n as f64;
        let images = (10.0 * sigma / PI).ceil() as i64 + 2;
        let nodes: Vec<f64> = (0..n).map(|i| -0.5 * PI + (i as f64 + 0.5) * h).collect();
        let mut weights: Vec<f64> = nodes
            .iter()
            .map(|&phi| {
                (-images..=images)
                    .map(|m| {
                        let y = (phi + m as f64 * PI) / sigma;
                        (-0.5 * y * y).exp()
                    })
                    .sum::<f64>()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Self { nodes, weights }
    }

    /// Node count for [`GaussRule::periodic_normal`] that resolves the
    /// density at width `sigma`, never below `base`.
    pub fn periodic_nodes(base: usize, sigma: f64) -> usize {
        if sigma == 0.0 {
            return 1;
        }
        base.max((5.0 / sigma).ceil() as usize)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Visits every point of the tensor product of `rule` with itself in
/// `dim` dimensions, in lexicographic order of node indices.
pub fn for_each_tensor_point(rule: &GaussRule, dim: usize, mut f: impl FnMut(&[f64], f64)) {
    let n = rule.len();
    if dim == 0 {
        f(&[], 1.0);
        return;
    }
    let mut idx = vec![0usize; dim];
    let mut point = vec![rule.nodes[0]; dim];
    loop {
        let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
        f(&point, w);
        let mut d = dim;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < n {
                point[d] = rule.nodes[idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = rule.nodes[0];
        }
    }
}
