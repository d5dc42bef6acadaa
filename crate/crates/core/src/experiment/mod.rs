//! Experiment configurations, the figure presets and the end-to-end runner
//! from model to spacing statistics and output files.

mod config;
mod output;
mod presets;
mod run;

pub use config::{
    ExperimentConfig, FieldSpec, HistogramConfig, ModelConfig, SolverConfig, Target,
    UnfoldingConfig, MAX_RUNNABLE_SITES,
};
pub use output::{emit_figure_data, write_outputs, CURVE_STEP};
pub use presets::{
    find_preset, half_filling_sectors, list_presets, preset_names, Preset, Scale, DELTA_SWEEP,
};
pub use run::{
    exit_code, run_all, run_experiment, ModeSummary, NumberVariancePoint, ResultBundle, Runtime,
    SectorData, SectorSummary, Summary, UnfoldingRecord, NUMBER_VARIANCE_WINDOWS,
};
