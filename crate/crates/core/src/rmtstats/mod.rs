//! Level-spacing statistics: unfolding, Wigner surmises, Kolmogorov-Smirnov
//! distances, histograms, number variance and random-matrix reference spectra.

mod numvar;
mod sample;
mod surmise;
mod synthetic;
mod unfold;

pub use numvar::{number_variance, number_variance_pooled, NUMBER_VARIANCE_SEED};
pub use sample::{
    classify, classify_among, ks_distance, ks_statistic, spacing_histogram, Classification,
    KsReport, Provenance, SpacingSample, DEFAULT_MARGIN, MIN_CLASSIFY_SAMPLE,
};
pub use surmise::{surmise_cdf, surmise_pdf, surmise_quantile, Ensemble};
pub use synthetic::{generate_synthetic, MIN_SYNTHETIC_DIM};
pub use unfold::{
    unfold, unfold_with, UnfoldMethod, UnfoldOptions, UnfoldedSpectrum, DEFAULT_DEGREE,
    DEFAULT_TRIM, MAX_TRIM,
};
