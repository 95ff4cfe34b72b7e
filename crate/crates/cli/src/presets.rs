// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Figure presets shipped as TOML files under `presets/`.

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
    ("fig10", include_str!("../presets/fig10.toml")),
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

pub fn load(name: &str) -> Result<ExperimentConfig, CliError> {
    let text = PRESETS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| p.1)
        .ok_or_else(|| CliError::Config(format!("unknown figure `{name}`; available: {}", names().join(", "))))?;
    ExperimentConfig::from_toml(text).map_err(|e| CliError::Config(format!("preset {name}: {e}")))
}
