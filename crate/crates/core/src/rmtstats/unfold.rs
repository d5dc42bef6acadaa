use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eigen::{Spectrum, SpectrumSource};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_DEGREE: usize = 6;
pub const DEFAULT_TRIM: f64 = 0.02;
pub const MAX_TRIM: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnfoldMethod {
    Polynomial { degree: usize },
    LogPolynomial { degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldOptions {
    pub degree: usize,
    pub trim_fraction: f64,
    pub use_log: bool,
}

impl Default for UnfoldOptions {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            trim_fraction: DEFAULT_TRIM,
            use_log: false,
        }
    }
}

/// Levels mapped through a smooth fit of the counting function, so that the
/// local mean spacing is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedSpectrum {
    levels: Vec<f64>,
    method: UnfoldMethod,
    /// Levels removed at each edge.
    trimmed: usize,
    discarded_count: usize,
    /// Set when every input level coincides, in which case all spacings vanish.
    degenerate: bool,
    source: SpectrumSource,
}

impl UnfoldedSpectrum {
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn method(&self) -> UnfoldMethod {
        self.method
    }

    pub fn trimmed(&self) -> usize {
        self.trimmed
    }

    pub fn discarded_count(&self) -> usize {
        self.discarded_count
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    pub fn spacings(&self) -> Vec<f64> {
        self.levels.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn mean_spacing(&self) -> f64 {
        let n = self.levels.len();
        if n < 2 {
            return 0.0;
        }
        (self.levels[n - 1] - self.levels[0]) / (n - 1) as f64
    }

    pub fn span(&self) -> f64 {
        match (self.levels.first(), self.levels.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

pub fn unfold(
    spectrum: &Spectrum,
    degree: usize,
    trim_fraction: f64,
    use_log: bool,
) -> Result<UnfoldedSpectrum> {
    let values = spectrum.values();
    if degree == 0 {
        return invalid("unfolding degree must be at least 1");
    }
    if values.len() < degree + 10 {
        return Err(Error::SampleSize {
            needed: degree + 10,
            got: values.len(),
        });
    }
    if !(0.0..=MAX_TRIM).contains(&trim_fraction) {
        return invalid(format!(
            "trim fraction must lie in [0, {MAX_TRIM}], got {trim_fraction}"
        ));
    }
    if use_log && values.iter().any(|&v| v <= 0.0) {
        return invalid("logarithmic unfolding needs strictly positive levels");
    }
    let method = if use_log {
        UnfoldMethod::LogPolynomial { degree }
    } else {
        UnfoldMethod::Polynomial { degree }
    };
    let mut x: Vec<f64> = if use_log {
        values.iter().map(|v| v.ln()).collect()
    } else {
        values.to_vec()
    };
    x.sort_by(|a, b| a.total_cmp(b));
    let n = x.len();
    let trimmed = (trim_fraction * n as f64).floor() as usize;
    let mean = x.iter().sum::<f64>() / n as f64;
    let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();

    let (mut levels, degenerate) = if std == 0.0 || !std.is_finite() {
        (vec![0.5 * (n as f64 + 1.0); n], true)
    } else {
        let t: Vec<f64> = x.iter().map(|v| (v - mean) / std).collect();
        let coeffs = fit_staircase(&t, degree)?;
        let mut mapped: Vec<f64> = t.iter().map(|&v| horner(&coeffs, v)).collect();
        mapped.sort_by(|a, b| a.total_cmp(b));
        (mapped, false)
    };
    levels.drain(..trimmed);
    levels.truncate(levels.len() - trimmed);
    Ok(UnfoldedSpectrum {
        levels,
        method,
        trimmed,
        discarded_count: spectrum.discarded_count(),
        degenerate,
        source: spectrum.source().clone(),
    })
}

pub fn unfold_with(spectrum: &Spectrum, opts: &UnfoldOptions) -> Result<UnfoldedSpectrum> {
    unfold(spectrum, opts.degree, opts.trim_fraction, opts.use_log)
}

/// Least-squares coefficients (constant first) of the staircase `N(t_j) = j`.
fn fit_staircase(t: &[f64], degree: usize) -> Result<Vec<f64>> {
    let n = t.len();
    let a = DMatrix::from_fn(n, degree + 1, |r, c| t[r].powi(c as i32));
    let b = DVector::from_iterator(n, (1..=n).map(|j| j as f64));
    let svd = a.svd(true, true);
    let sol = svd
        .solve(&b, 1e-13)
        .map_err(|e| Error::DenseEigen(format!("staircase fit failed: {e}")))?;
    Ok(sol.iter().copied().collect())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(values: Vec<f64>) -> Spectrum {
        Spectrum::new(values, 0, SpectrumSource::labelled("test"))
    }

    #[test]
    fn ladder_unfolds_to_unit_spacings() {
        let s = spectrum((1..=60).map(|j| j as f64).collect());
        for degree in [1, 3, 6] {
            let u = unfold(&s, degree, 0.0, false).unwrap();
            assert!(u.spacings().iter().all(|d| (d - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn geometric_ladder_with_log() {
        let s = spectrum((0..40).map(|j| 2f64.powi(j)).collect());
        let u = unfold(&s, 6, 0.0, true).unwrap();
        assert!(u.spacings().iter().all(|d| (d - 1.0).abs() < 1e-9));
        assert_eq!(u.method(), UnfoldMethod::LogPolynomial { degree: 6 });
    }

    #[test]
    fn preconditions() {
        let short = spectrum((1..=12).map(|j| j as f64).collect());
        assert!(matches!(unfold(&short, 6, 0.0, false), Err(Error::SampleSize { .. })));
        let s = spectrum((-10..40).map(|j| j as f64).collect());
        assert!(matches!(unfold(&s, 3, 0.0, true), Err(Error::InvalidArgument(_))));
        assert!(matches!(unfold(&s, 3, 0.2, false), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn trimming_removes_both_edges() {
        let s = spectrum((1..=100).map(|j| j as f64).collect());
        let u = unfold(&s, 2, 0.05, false).unwrap();
        assert_eq!(u.trimmed(), 5);
        assert_eq!(u.levels().len(), 90);
    }

    #[test]
    fn coincident_levels_are_flagged() {
        let s = spectrum(vec![0.25; 30]);
        let u = unfold(&s, 3, 0.0, false).unwrap();
        assert!(u.is_degenerate());
        assert!(u.spacings().iter().all(|&d| d == 0.0));
    }
}
