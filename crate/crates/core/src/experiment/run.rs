use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Target};
use super::output::{write_outputs, write_failure};
use crate::eigen::{
    block_spectrum, find_decay_modes_with, find_ness_with, DecayOptions, DensityOperator,
    ModeKind, NessOptions, SectorProblem, Spectrum, UNIQUENESS_SEED,
};
use crate::error::{Error, Result};
use crate::rmtstats::{
    classify, number_variance_pooled, unfold, Classification, KsReport, SpacingSample,
    UnfoldedSpectrum, MIN_CLASSIFY_SAMPLE, NUMBER_VARIANCE_SEED,
};

/// Windows per number-variance estimate.
pub const NUMBER_VARIANCE_WINDOWS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub mode: usize,
    pub n_up: usize,
    pub level_count: usize,
    pub discarded_count: usize,
    pub discarded_sum: f64,
    pub spacing_count: usize,
    pub degenerate: bool,
    pub use_log: bool,
    pub ks: Option<KsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub index: usize,
    pub model_id: String,
    pub kind: ModeKind,
    pub lambda_re: f64,
    pub lambda_im: f64,
    /// `‖L̂ρ - Λρ‖ / ‖ρ‖`.
    pub residual: f64,
    pub spacing_count: usize,
    pub ks: Option<KsReport>,
    pub classification: Option<Classification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberVariancePoint {
    pub length: f64,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingRecord {
    pub degree: usize,
    pub trim_fraction: f64,
    pub zero_cutoff: f64,
    /// `polynomial` or `log_polynomial` per mode kind actually used.
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub wall_seconds: f64,
    pub matvecs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: ExperimentConfig,
    pub unfolding: Option<UnfoldingRecord>,
    pub modes: Vec<ModeSummary>,
    pub sectors: Vec<SectorSummary>,
    pub spacing_count: usize,
    pub ks: Option<KsReport>,
    pub classification: Option<Classification>,
    pub number_variance: Vec<NumberVariancePoint>,
    /// Machine-dependent; excluded when comparing runs.
    pub runtime: Runtime,
}

#[derive(Debug, Clone)]
pub struct SectorData {
    pub mode: usize,
    pub spectrum: Spectrum,
    pub unfolded: UnfoldedSpectrum,
    pub sample: SpacingSample,
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub summary: Summary,
    pub modes: Vec<DensityOperator>,
    pub sectors: Vec<SectorData>,
    pub pooled: SpacingSample,
}

impl ResultBundle {
    pub fn mode_sample(&self, mode: usize) -> SpacingSample {
        SpacingSample::pool(self.sectors.iter().filter(|s| s.mode == mode).map(|s| &s.sample))
    }
}

/// Runs the pipeline and, when `config.out_dir` is set, writes the output
/// files there. On failure a summary marked `failed` is still written.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultBundle> {
    let start = Instant::now();
    match compute(config, start) {
        Ok(bundle) => {
            if let Some(dir) = &config.out_dir {
                write_outputs(&bundle, dir)?;
            }
            Ok(bundle)
        }
        Err(err) => {
            if let Some(dir) = &config.out_dir {
                write_failure(config, &err, start.elapsed().as_secs_f64(), dir)?;
            }
            Err(err)
        }
    }
}

/// Runs every configuration, each into its own subdirectory of `out_dir`
/// when there is more than one.
pub fn run_all(configs: &[ExperimentConfig], out_dir: Option<&Path>) -> Result<Vec<ResultBundle>> {
    let nested = configs.len() > 1;
    configs
        .iter()
        .map(|cfg| {
            let mut cfg = cfg.clone();
            if let Some(dir) = out_dir {
                cfg.out_dir = Some(if nested {
                    dir.join(&cfg.name)
                } else {
                    PathBuf::from(dir)
                });
            }
            run_experiment(&cfg)
        })
        .collect()
}

fn compute(config: &ExperimentConfig, start: Instant) -> Result<ResultBundle> {
    config.validate()?;
    config.check_runnable()?;
    let model = config.model.build()?;
    let problem = SectorProblem::new(&model)?;
    let matrix = problem.matrix();

    let (modes, matvecs) = match config.target {
        Target::Ness => {
            let sol = find_ness_with(
                &problem,
                &NessOptions {
                    tol: config.solver.tol,
                    max_iter: config.solver.max_iter,
                    restart: config.solver.restart,
                    check_uniqueness: config.solver.check_uniqueness,
                    seed: UNIQUENESS_SEED ^ config.seed,
                    ..NessOptions::default()
                },
            )?;
            (vec![sol.rho], sol.matvecs)
        }
        Target::Hdm { k } => {
            let defaults = DecayOptions::default();
            let modes = find_decay_modes_with(
                &problem,
                k,
                &DecayOptions {
                    tol: config.solver.tol,
                    max_iter: config.solver.max_iter,
                    seed: defaults.seed ^ config.seed,
                },
            )?;
            (modes, 0)
        }
    };

    let mut mode_summaries = Vec::with_capacity(modes.len());
    let mut sectors = Vec::new();
    let mut methods = Vec::new();
    for (index, rho) in modes.iter().enumerate() {
        let model_id = match rho.kind() {
            ModeKind::Ness => format!("{}/ness", config.name),
            ModeKind::Hdm => format!("{}/hdm{}", config.name, index + 1),
        };
        let use_log = config
            .unfolding
            .use_log
            .unwrap_or(rho.kind() == ModeKind::Ness);
        let method = if use_log { "log_polynomial" } else { "polynomial" };
        if !methods.iter().any(|m| m == method) {
            methods.push(method.to_string());
        }
        let data: Vec<SectorData> = config
            .sectors
            .par_iter()
            .map(|&n_up| {
                let mut spectrum = block_spectrum(rho, n_up, config.zero_cutoff)?;
                if use_log {
                    spectrum = spectrum.positive_part()?;
                }
                let unfolded = unfold(
                    &spectrum,
                    config.unfolding.degree,
                    config.unfolding.trim_fraction,
                    use_log,
                )?;
                let sample = SpacingSample::from_unfolded(&unfolded, model_id.clone());
                Ok(SectorData {
                    mode: index,
                    spectrum,
                    unfolded,
                    sample,
                })
            })
            .collect::<Result<_>>()?;

        let residual = {
            let lx = matrix.mul_vec(rho.coefficients());
            let lambda = rho.lambda();
            let num: f64 = lx
                .iter()
                .zip(rho.coefficients())
                .map(|(a, x)| (a - lambda * x).norm_sqr())
                .sum::<f64>()
                .sqrt();
            num / rho.frobenius_norm()
        };
        let mode_sample = SpacingSample::pool(data.iter().map(|d| &d.sample));
        let (ks, classification) = summarize(&mode_sample, config.margin)?;
        mode_summaries.push(ModeSummary {
            index,
            model_id,
            kind: rho.kind(),
            lambda_re: rho.lambda().re,
            lambda_im: rho.lambda().im,
            residual,
            spacing_count: mode_sample.len(),
            ks,
            classification,
        });
        sectors.extend(data);
    }

    let pooled = SpacingSample::pool(sectors.iter().map(|d| &d.sample));
    let (ks, classification) = summarize(&pooled, config.margin)?;
    let unfolded: Vec<&UnfoldedSpectrum> = sectors
        .iter()
        .filter(|d| !d.unfolded.is_degenerate())
        .map(|d| &d.unfolded)
        .collect();
    let number_variance = config
        .number_variance_lengths
        .iter()
        .map(|&length| {
            if unfolded.is_empty() {
                return NumberVariancePoint {
                    length,
                    value: None,
                    note: Some("no non-degenerate spectra".into()),
                };
            }
            match number_variance_pooled(
                &unfolded,
                length,
                NUMBER_VARIANCE_WINDOWS,
                NUMBER_VARIANCE_SEED ^ config.seed,
            ) {
                Ok(v) => NumberVariancePoint {
                    length,
                    value: Some(v),
                    note: None,
                },
                Err(e) => NumberVariancePoint {
                    length,
                    value: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();

    let sector_summaries = sectors
        .iter()
        .map(|d| {
            Ok(SectorSummary {
                mode: d.mode,
                n_up: d.spectrum.source().n_up.unwrap_or_default(),
                level_count: d.spectrum.len(),
                discarded_count: d.spectrum.discarded_count(),
                discarded_sum: d.spectrum.discarded_sum(),
                spacing_count: d.sample.len(),
                degenerate: d.unfolded.is_degenerate(),
                use_log: matches!(
                    d.unfolded.method(),
                    crate::rmtstats::UnfoldMethod::LogPolynomial { .. }
                ),
                ks: if d.sample.is_empty() {
                    None
                } else {
                    Some(KsReport::compute(&d.sample)?)
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ResultBundle {
        summary: Summary {
            status: "ok".into(),
            error: None,
            config: config.clone(),
            unfolding: Some(UnfoldingRecord {
                degree: config.unfolding.degree,
                trim_fraction: config.unfolding.trim_fraction,
                zero_cutoff: config.zero_cutoff,
                methods,
            }),
            modes: mode_summaries,
            sectors: sector_summaries,
            spacing_count: pooled.len(),
            ks,
            classification,
            number_variance,
            runtime: Runtime {
                wall_seconds: start.elapsed().as_secs_f64(),
                matvecs,
            },
        },
        modes,
        sectors,
        pooled,
    })
}

fn summarize(
    sample: &SpacingSample,
    margin: f64,
) -> Result<(Option<KsReport>, Option<Classification>)> {
    if sample.is_empty() {
        return Ok((None, None));
    }
    let ks = KsReport::compute(sample)?;
    let classification = if sample.len() >= MIN_CLASSIFY_SAMPLE {
        Some(classify(sample, margin)?)
    } else {
        None
    };
    Ok((Some(ks), classification))
}

/// Process exit code for an error: 2 for configuration problems, 3 for
/// solver non-convergence, 4 for a degenerate steady state, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::UnknownPreset { .. }
        | Error::Json(_)
        | Error::DimensionMismatch { .. } => 2,
        Error::Convergence { .. } | Error::PartialModes { .. } => 3,
        Error::Degeneracy(_) => 4,
        _ => 1,
    }
}
