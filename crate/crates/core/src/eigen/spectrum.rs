use serde::{Deserialize, Serialize};

use super::dense::hermitian_eigenvalues;
use super::density::{DensityOperator, ModeKind};
use crate::error::{Error, Result};

/// Default relative cutoff below which eigenvalues count as numerical zeros.
pub const DEFAULT_ZERO_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSource {
    pub label: String,
    pub kind: Option<ModeKind>,
    pub n: Option<usize>,
    pub n_up: Option<usize>,
    pub lambda: Option<f64>,
}

impl SpectrumSource {
    pub fn labelled(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: None,
            n: None,
            n_up: None,
            lambda: None,
        }
    }
}

/// Ascending eigenvalues of one block with numerical zeros removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    discarded_count: usize,
    /// Sum of the discarded eigenvalues.
    discarded_sum: f64,
    source: SpectrumSource,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, discarded_count: usize, source: SpectrumSource) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        Self {
            values,
            discarded_count,
            discarded_sum: 0.0,
            source,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn discarded_count(&self) -> usize {
        self.discarded_count
    }

    pub fn discarded_sum(&self) -> f64 {
        self.discarded_sum
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when two neighbouring values coincide, in which case the order
    /// is only non-strict.
    pub fn is_degenerate(&self) -> bool {
        self.values.windows(2).any(|w| w[0] == w[1])
    }

    /// Moves the non-positive values into the discarded count, as needed
    /// before a logarithmic unfolding.
    pub fn positive_part(&self) -> Result<Spectrum> {
        let split = self.values.partition_point(|&v| v <= 0.0);
        if split == self.values.len() {
            return Err(Error::EmptySpectrum {
                discarded: self.discarded_count + split,
            });
        }
        Ok(Spectrum {
            values: self.values[split..].to_vec(),
            discarded_count: self.discarded_count + split,
            discarded_sum: self.discarded_sum + self.values[..split].iter().sum::<f64>(),
            source: self.source.clone(),
        })
    }
}

/// Eigenvalues of the `N↑ = n_up` block of `rho`. Values with
/// `|λ| < zero_cutoff · max|λ|` are moved to the discarded count.
pub fn block_spectrum(rho: &DensityOperator, n_up: usize, zero_cutoff: f64) -> Result<Spectrum> {
    if !(zero_cutoff >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "zero cutoff must be non-negative, got {zero_cutoff}"
        )));
    }
    let eig = hermitian_eigenvalues(&rho.block(n_up)?);
    let largest = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = zero_cutoff * largest;
    let (kept, dropped): (Vec<f64>, Vec<f64>) = eig
        .iter()
        .partition(|&&v| v.abs() >= threshold && v != 0.0);
    if kept.is_empty() {
        return Err(Error::EmptySpectrum {
            discarded: dropped.len(),
        });
    }
    let mut spectrum = Spectrum::new(
        kept,
        dropped.len(),
        SpectrumSource {
            label: match rho.kind() {
                ModeKind::Ness => "ness".to_string(),
                ModeKind::Hdm => format!("hdm({:.8})", rho.lambda().re),
            },
            kind: Some(rho.kind()),
            n: Some(rho.n()),
            n_up: Some(n_up),
            lambda: Some(rho.lambda().re),
        },
    );
    spectrum.discarded_sum = dropped.iter().sum();
    Ok(spectrum)
}
