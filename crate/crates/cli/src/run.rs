// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Dispatch from a validated configuration to the engines.
//!
//! Grid points run in parallel and are collected in grid order, so the
//! tables do not depend on scheduling.

use std::path::{Path, PathBuf};

use distill_core::asymptotic::asymptotic_general;
use distill_core::collective::{
    build_interferometer, collective_variance_general_estimate, collective_variance_x_estimate, ConditioningSpec,
};
use distill_core::cov;
use distill_core::iterative::{run_iterations_cached, tradeoff_sweep, IterationConfig, IterationReport, StateCache};
use distill_core::measurement::{Quadrature, Window};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::plot;
use crate::table::{Cell, Provenance, ResultTable};

fn window_label(w: Window) -> String {
    match w {
        Window::HalfWidth(x) => format!("{x}"),
        Window::Infinite => "inf".into(),
    }
}

/// Runs the configured experiment. `cfg` must have passed validation.
pub fn run(cfg: &ExperimentConfig, cache: &dyn StateCache) -> Result<Vec<ResultTable>, CliError> {
    match cfg.mode()? {
        Mode::Iterate => iterate(cfg, cache),
        Mode::Collective => collective(cfg),
        Mode::Asymptotic => asymptotic(cfg, cache),
        Mode::Tradeoff => tradeoff(cfg),
    }
}

fn iteration_config(cfg: &ExperimentConfig, sigma: f64, window: Window, quadrature: Quadrature) -> IterationConfig {
    IterationConfig {
        spec: cfg.spec(),
        noise: ExperimentConfig::noise(sigma),
        window,
        eta: cfg.eta,
        quadrature,
        iterations: cfg.iterations,
        cutoff: cfg.cutoff,
        verify_eta: cfg.verify_eta,
    }
}

fn iterate_point(
    cfg: &ExperimentConfig,
    sigma: f64,
    window: Window,
    (qname, q): &(String, Quadrature),
    cache: &dyn StateCache,
) -> Result<Vec<IterationReport>, CliError> {
    let point = format!("sigma={sigma}, window={}, quadrature={qname}", window_label(window));
    log::debug!("iterate {point}");
    let reports = run_iterations_cached(&iteration_config(cfg, sigma, window, *q), cache)
        .map_err(|e| CliError::engine(point.clone(), e))?;
    for r in &reports {
        if r.trace_deficit > distill_core::fock::TRUNCATION_WARNING {
            log::warn!("{point}, k={}: truncation deficit {:.2e}; consider a larger cutoff", r.k, r.trace_deficit);
        }
    }
    Ok(reports)
}

fn iterate(cfg: &ExperimentConfig, cache: &dyn StateCache) -> Result<Vec<ResultTable>, CliError> {
    let quads = cfg.quadratures();
    let windows = cfg.windows();
    let sigmas = cfg.sigmas();
    let split = quads.len() * windows.len() > 1;
    let mut tables = Vec::new();
    for q in &quads {
        for &w in &windows {
            let stem = if split {
                format!("{}_{}_X{}", cfg.stem(), q.0, window_label(w))
            } else {
                cfg.stem()
            };
            let results: Vec<Vec<IterationReport>> = sigmas
                .par_iter()
                .map(|&s| iterate_point(cfg, s, w, q, cache))
                .collect::<Result<_, _>>()?;
            let mut t = ResultTable::new(
                stem.clone(),
                &[
                    ("sigma", "rad"),
                    ("k", "steps"),
                    ("variance_x", "vac=0.5"),
                    ("variance_p", "vac=0.5"),
                    ("purity", "1"),
                    ("gaussian_fidelity", "1"),
                    ("step_success", "1"),
                    ("cumulative_success", "1"),
                    ("joint_success", "1"),
                    ("trace_deficit", "1"),
                ],
            )
            .panel(format!("{stem}_variance"), "sigma", "variance_x", Some("k"))
            .panel(format!("{stem}_purity"), "sigma", "purity", Some("k"))
            .panel(format!("{stem}_success"), "sigma", "cumulative_success", Some("k"))
            .panel(format!("{stem}_fidelity"), "sigma", "gaussian_fidelity", Some("k"));
            for (&s, reports) in sigmas.iter().zip(&results) {
                for r in reports {
                    t.push(vec![
                        s.into(),
                        r.k.into(),
                        r.variance_x.into(),
                        r.variance_p.into(),
                        r.purity.into(),
                        r.gaussian_fidelity.into(),
                        r.step_success.into(),
                        r.cumulative_success.into(),
                        r.joint_success.into(),
                        r.trace_deficit.into(),
                    ]);
                }
            }
            tables.push(t);
        }
    }
    Ok(tables)
}

fn tradeoff(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>, CliError> {
    let widths: Vec<f64> = cfg.window.values();
    let mut t = ResultTable::new(
        cfg.stem(),
        &[
            ("sigma", "rad"),
            ("window", "q"),
            ("cumulative_success", "1"),
            ("variance_x", "vac=0.5"),
            ("purity", "1"),
        ],
    )
    .panel(format!("{}_variance", cfg.stem()), "cumulative_success", "variance_x", Some("sigma"))
    .panel(format!("{}_purity", cfg.stem()), "cumulative_success", "purity", Some("sigma"));
    let (qname, q) = cfg.quadratures().remove(0);
    for s in cfg.sigmas() {
        let base = iteration_config(cfg, s, Window::HalfWidth(widths[0]), q);
        let points = tradeoff_sweep(&base, &widths)
            .map_err(|e| CliError::engine(format!("sigma={s}, quadrature={qname}"), e))?;
        for p in points {
            t.push(vec![s.into(), p.half_width.into(), p.success.into(), p.variance_x.into(), p.purity.into()]);
        }
    }
    Ok(vec![t])
}

fn collective(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>, CliError> {
    let sigmas = cfg.sigmas();
    let integ = cfg.integration_config();
    let sv = cfg.spec();
    let mut t = ResultTable::new(
        cfg.stem(),
        &[
            ("sigma", "rad"),
            ("copies", "copies"),
            ("detectors", "-"),
            ("curve", "-"),
            ("variance_x", "vac=0.5"),
            ("std_error", "vac=0.5"),
            ("evaluations", "1"),
        ],
    )
    .panel(format!("{}_variance", cfg.stem()), "sigma", "variance_x", Some("curve"));
    for &s in &sigmas {
        let v = ExperimentConfig::noise(s).dephased_variance_x(&sv);
        let seen = cfg.eta * v + 0.5 * (1.0 - cfg.eta);
        t.push(vec![s.into(), 1usize.into(), "".into(), "in".into(), seen.into(), "".into(), 0usize.into()]);
    }
    let labelled = !cfg.detectors.is_empty();
    for n in cfg.copies.values() {
        let point = |s: f64| format!("copies={n}, sigma={s}");
        let spec = build_interferometer(&cfg.transmittances_for(n)).map_err(|e| CliError::engine(point(f64::NAN), e))?;
        for (label, angles) in cfg.strategies(n) {
            let plain_x = cfg.eta == 1.0 && angles.iter().all(|&a| a == 0.0);
            let cond = ConditioningSpec {
                angles,
                eta: cfg.eta,
            };
            let estimates = sigmas
                .par_iter()
                .map(|&s| {
                    let noise = ExperimentConfig::noise(s);
                    let est = if plain_x {
                        collective_variance_x_estimate(&spec, &sv, &noise, &integ)
                    } else {
                        collective_variance_general_estimate(&spec, &cond, &sv, &noise, &integ)
                    };
                    est.map_err(|e| CliError::engine(format!("{}, detectors={label}", point(s)), e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let curve = if labelled { format!("N={n} {label}") } else { format!("N={n}") };
            for (&s, e) in sigmas.iter().zip(estimates) {
                t.push(vec![
                    s.into(),
                    n.into(),
                    label.clone().into(),
                    curve.clone().into(),
                    e.value.into(),
                    e.std_error.map_or(Cell::Text(String::new()), Cell::Num),
                    e.evaluations.into(),
                ]);
            }
        }
    }
    Ok(vec![t])
}

fn asymptotic(cfg: &ExperimentConfig, cache: &dyn StateCache) -> Result<Vec<ResultTable>, CliError> {
    let sigmas = cfg.sigmas();
    let thetas = cfg.theta.values();
    let sv = cfg.spec();
    let grid: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| thetas.iter().map(move |&t| (s, t))).collect();
    let results = grid
        .par_iter()
        .map(|&(s, theta)| {
            let r = asymptotic_general(
                &sv,
                &ExperimentConfig::noise(s),
                theta,
                cfg.eta,
                Some(cfg.verify_eta),
                &cfg.r_schedule,
            )
            .map_err(|e| CliError::engine(format!("sigma={s}, theta={theta}"), e))?;
            for c in &r.caveats {
                log::warn!("sigma={s}, theta={theta}: {c}");
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let stem = cfg.stem();
    let mut t = ResultTable::new(
        stem.clone(),
        &[
            ("sigma", "rad"),
            ("theta", "rad"),
            ("variance_x", "vac=0.5"),
            ("variance_p", "vac=0.5"),
            ("covariance_xp", "vac=0.5"),
            ("purity", "1"),
            ("convergence_gap", "vac=0.5"),
            ("r_used", "1"),
        ],
    );
    t = if thetas.len() > 1 {
        t.panel(format!("{stem}_variance"), "theta", "variance_x", Some("sigma"))
            .panel(format!("{stem}_purity"), "theta", "purity", Some("sigma"))
    } else {
        t.panel(format!("{stem}_variance"), "sigma", "variance_x", None)
            .panel(format!("{stem}_purity"), "sigma", "purity", None)
    };
    for (&(s, theta), r) in grid.iter().zip(&results) {
        t.push(vec![
            s.into(),
            theta.into(),
            r.vx_lim.into(),
            r.vp_lim.into(),
            r.sigma_lim[(0, 1)].into(),
            r.purity_lim.into(),
            r.convergence_gap.into(),
            r.r_used.into(),
        ]);
    }
    let mut tables = vec![t];
    if cfg.compare_iterations {
        tables.push(limit_comparison(cfg, &results, cache)?);
    }
    Ok(tables)
}

/// Finite iterations next to the limit and the undephased input, all as
/// seen by the verifying detector. Requires a single `theta` and `window`.
fn limit_comparison(
    cfg: &ExperimentConfig,
    limits: &[distill_core::asymptotic::AsymptoticResult],
    cache: &dyn StateCache,
) -> Result<ResultTable, CliError> {
    let theta = cfg.theta.values()[0];
    let window = cfg.windows()[0];
    let q = (format!("{theta}"), Quadrature::Angle(theta));
    let sigmas = cfg.sigmas();
    let runs = sigmas
        .par_iter()
        .map(|&s| iterate_point(cfg, s, window, &q, cache))
        .collect::<Result<Vec<_>, _>>()?;
    let sv = cfg.spec();
    let clean = cov::attenuate(&nalgebra::Matrix2::new(sv.vx, 0.0, 0.0, sv.vp), cfg.verify_eta);
    let stem = format!("{}_iterations", cfg.stem());
    let mut t = ResultTable::new(stem.clone(), &[("sigma", "rad"), ("curve", "-"), ("variance_x", "vac=0.5"), ("purity", "1")])
        .panel(format!("{stem}_variance"), "sigma", "variance_x", Some("curve"))
        .panel(format!("{stem}_purity"), "sigma", "purity", Some("curve"));
    for ((&s, reports), lim) in sigmas.iter().zip(&runs).zip(limits) {
        for r in reports {
            let label = if r.k == 0 { "in".to_string() } else { format!("k={}", r.k) };
            t.push(vec![s.into(), label.into(), r.variance_x.into(), r.purity.into()]);
        }
        t.push(vec![s.into(), "limit".into(), lim.vx_lim.into(), lim.purity_lim.into()]);
        t.push(vec![s.into(), "no-dephasing".into(), clean[(0, 0)].into(), cov::purity(&clean).into()]);
    }
    Ok(t)
}

/// Writes every table, its panel pivots and optionally their SVG renderings
/// into `out`; returns the paths written, in order.
pub fn write_outputs(
    tables: &[ResultTable],
    out: &Path,
    prov: &Provenance,
    plot: bool,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for t in tables {
        let path = out.join(format!("{}.csv", t.name));
        t.save(&path, prov)?;
        written.push(path);
        for p in &t.panels {
            let wide = t.pivot(p);
            let path = out.join(format!("{}.csv", p.stem));
            wide.save(&path, prov)?;
            written.push(path);
            if plot {
                let unit = |c: &str| t.columns[t.column_index(c).expect("panel column")].unit;
                let svg = plot::line_chart(
                    &p.stem,
                    &format!("{} [{}]", p.x, unit(&p.x)),
                    &format!("{} [{}]", p.y, unit(&p.y)),
                    &t.series(p),
                );
                let path = out.join(format!("{}.svg", p.stem));
                std::fs::write(&path, svg).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
