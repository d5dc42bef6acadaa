use serde::{Deserialize, Serialize};

use super::config::{
    ExperimentConfig, FieldSpec, HistogramConfig, ModelConfig, SolverConfig, Target,
    UnfoldingConfig,
};
use crate::eigen::DEFAULT_ZERO_CUTOFF;
use crate::error::{Error, Result};
use crate::rmtstats::DEFAULT_MARGIN;

/// Δ values of the anisotropy sweep.
pub const DELTA_SWEEP: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Paper,
    Desk,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Scale::Paper),
            "desk" => Ok(Scale::Desk),
            other => Err(Error::InvalidArgument(format!(
                "scale must be `paper` or `desk`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub paper: Vec<ExperimentConfig>,
    pub desk: Vec<ExperimentConfig>,
}

impl Preset {
    pub fn configs(&self, scale: Scale) -> &[ExperimentConfig] {
        match scale {
            Scale::Paper => &self.paper,
            Scale::Desk => &self.desk,
        }
    }
}

struct Params {
    delta: f64,
    field: FieldSpec,
    gamma: f64,
    mu: f64,
    mu_bar: f64,
    dephasing: f64,
    target: Target,
}

fn config(name: &str, p: &Params, n: usize, sectors: Vec<usize>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        model: ModelConfig {
            n,
            delta: p.delta,
            field: p.field.clone(),
            gamma: p.gamma,
            mu: p.mu,
            mu_bar: p.mu_bar,
            dephasing: p.dephasing,
        },
        sectors,
        target: p.target,
        unfolding: UnfoldingConfig::default(),
        zero_cutoff: DEFAULT_ZERO_CUTOFF,
        seed: 1,
        solver: SolverConfig::default(),
        margin: DEFAULT_MARGIN,
        histogram: HistogramConfig::default(),
        number_variance_lengths: vec![1.0, 2.0, 3.0],
        out_dir: None,
    }
}

/// Up-spin counts around half filling: three blocks for even `n`, four for
/// odd `n`.
pub fn half_filling_sectors(n: usize) -> Vec<usize> {
    let lo = (n / 2).saturating_sub(1);
    let hi = (n + 1) / 2 + 1;
    (lo..=hi.min(n)).collect()
}

fn preset(
    name: &str,
    description: &str,
    p: Params,
    paper: (usize, usize),
    desk_n: usize,
) -> Preset {
    Preset {
        name: name.to_string(),
        description: description.to_string(),
        paper: vec![config(name, &p, paper.0, vec![paper.1])],
        desk: vec![config(name, &p, desk_n, half_filling_sectors(desk_n))],
    }
}

fn sweep_preset() -> Preset {
    let configs = |n: usize, sectors: Vec<usize>| {
        DELTA_SWEEP
            .iter()
            .map(|&delta| {
                let p = Params {
                    delta,
                    field: FieldSpec::Uniform,
                    gamma: 1.0,
                    mu: 0.2,
                    mu_bar: 0.3,
                    dephasing: 0.0,
                    target: Target::Ness,
                };
                config(&format!("fig3-delta{delta}"), &p, n, sectors.clone())
            })
            .collect()
    };
    Preset {
        name: "fig3".into(),
        description: "XXZ chain steady states across anisotropies".into(),
        paper: configs(13, vec![7]),
        desk: configs(9, half_filling_sectors(9)),
    }
}

pub fn list_presets() -> Vec<Preset> {
    let xx = |dephasing: f64, target: Target| Params {
        delta: 0.0,
        field: FieldSpec::Uniform,
        gamma: 1.0,
        mu: 0.2,
        mu_bar: 0.3,
        dephasing,
        target,
    };
    let staggered = |target: Target| Params {
        delta: 0.5,
        field: FieldSpec::Staggered,
        gamma: 1.0,
        mu: 0.1,
        mu_bar: 0.0,
        dephasing: 0.0,
        target,
    };
    vec![
        preset(
            "fig1a",
            "XX chain steady state",
            xx(0.0, Target::Ness),
            (16, 10),
            10,
        ),
        preset(
            "fig1b",
            "XX chain with dephasing, steady state",
            xx(1.0, Target::Ness),
            (14, 7),
            10,
        ),
        preset(
            "fig1c",
            "XXX chain under maximal driving, steady state",
            Params {
                delta: 1.0,
                field: FieldSpec::Uniform,
                gamma: 0.1,
                mu: 1.0,
                mu_bar: 0.0,
                dephasing: 0.0,
                target: Target::Ness,
            },
            (20, 5),
            10,
        ),
        preset(
            "fig2a",
            "XXZ chain steady state",
            Params {
                delta: 0.5,
                ..xx(0.0, Target::Ness)
            },
            (14, 7),
            11,
        ),
        preset(
            "fig2b",
            "XXZ chain in a staggered field, steady state",
            staggered(Target::Ness),
            (14, 7),
            11,
        ),
        sweep_preset(),
        preset(
            "fig4",
            "XX chain with dephasing, two leading decay modes",
            xx(1.0, Target::Hdm { k: 2 }),
            (13, 7),
            10,
        ),
        preset(
            "fig5",
            "XXZ chain in a staggered field, two leading decay modes",
            staggered(Target::Hdm { k: 2 }),
            (13, 7),
            10,
        ),
    ]
}

pub fn preset_names() -> Vec<String> {
    list_presets().into_iter().map(|p| p.name).collect()
}

pub fn find_preset(name: &str) -> Result<Preset> {
    list_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            valid: preset_names(),
        })
}
