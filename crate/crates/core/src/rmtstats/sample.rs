use serde::{Deserialize, Serialize};

use super::surmise::{cdf, Ensemble};
use super::unfold::UnfoldedSpectrum;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_id: String,
    pub n_up: Option<usize>,
    pub level_count: usize,
    pub discarded_count: usize,
}

/// Nearest-neighbour spacings of unfolded levels, possibly pooled over
/// several independently unfolded spectra.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpacingSample {
    spacings: Vec<f64>,
    provenance: Vec<Provenance>,
}

impl SpacingSample {
    pub fn new(spacings: Vec<f64>, provenance: Vec<Provenance>) -> Result<Self> {
        if spacings.iter().any(|s| !(*s >= 0.0)) {
            return invalid("spacings must be non-negative");
        }
        Ok(Self {
            spacings,
            provenance,
        })
    }

    pub fn from_unfolded(u: &UnfoldedSpectrum, model_id: impl Into<String>) -> Self {
        Self {
            spacings: u.spacings().into_iter().map(|s| s.max(0.0)).collect(),
            provenance: vec![Provenance {
                model_id: model_id.into(),
                n_up: u.source().n_up,
                level_count: u.levels().len(),
                discarded_count: u.discarded_count(),
            }],
        }
    }

    /// Concatenation of per-spectrum samples.
    pub fn pool<'a>(samples: impl IntoIterator<Item = &'a SpacingSample>) -> Self {
        let mut out = SpacingSample::default();
        for s in samples {
            out.spacings.extend_from_slice(&s.spacings);
            out.provenance.extend(s.provenance.iter().cloned());
        }
        out
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical distribution
/// of `values` and `cdf`.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::SampleSize { needed: 1, got: 0 });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = cdf(s);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

pub fn ks_statistic(sample: &SpacingSample, e: Ensemble) -> Result<f64> {
    ks_distance(&sample.spacings, |s| cdf(e, s))
}

/// Density-normalized histogram over `[0, s_max)`: bin centers and densities
/// `count / (N · bin_width)`, so the integral is the fraction of the sample
/// below `s_max`.
pub fn spacing_histogram(
    sample: &SpacingSample,
    bin_width: f64,
    s_max: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return invalid(format!("bin width must be positive, got {bin_width}"));
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return invalid(format!("histogram range must be positive, got {s_max}"));
    }
    let bins = ((s_max / bin_width) - 1e-9).ceil().max(1.0) as usize;
    let mut counts = vec![0usize; bins];
    for &s in &sample.spacings {
        if s < s_max {
            let b = ((s / bin_width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let norm = sample.spacings.len().max(1) as f64 * bin_width;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(b, &c)| ((b as f64 + 0.5) * bin_width, c as f64 / norm))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Poisson,
    Goe,
    Gue,
    Ambiguous,
}

impl From<Ensemble> for Classification {
    fn from(e: Ensemble) -> Self {
        match e {
            Ensemble::Poisson => Classification::Poisson,
            Ensemble::Goe => Classification::Goe,
            Ensemble::Gue => Classification::Gue,
        }
    }
}

pub const DEFAULT_MARGIN: f64 = 0.02;
pub const MIN_CLASSIFY_SAMPLE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub poisson: f64,
    pub goe: f64,
    pub gue: f64,
}

impl KsReport {
    pub fn compute(sample: &SpacingSample) -> Result<Self> {
        Ok(Self {
            poisson: ks_statistic(sample, Ensemble::Poisson)?,
            goe: ks_statistic(sample, Ensemble::Goe)?,
            gue: ks_statistic(sample, Ensemble::Gue)?,
        })
    }

    pub fn get(&self, e: Ensemble) -> f64 {
        match e {
            Ensemble::Poisson => self.poisson,
            Ensemble::Goe => self.goe,
            Ensemble::Gue => self.gue,
        }
    }

    /// Winner among `candidates` and its lead over the runner-up.
    pub fn ranking(&self, candidates: &[Ensemble]) -> (Ensemble, f64) {
        let mut ranked: Vec<(Ensemble, f64)> =
            candidates.iter().map(|&e| (e, self.get(e))).collect();
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
        let lead = ranked.get(1).map_or(f64::INFINITY, |r| r.1 - ranked[0].1);
        (ranked[0].0, lead)
    }
}

/// Ensemble with the smallest KS distance, provided it beats the runner-up
/// by at least `margin`.
pub fn classify(sample: &SpacingSample, margin: f64) -> Result<Classification> {
    classify_among(sample, &Ensemble::ALL, margin)
}

pub fn classify_among(
    sample: &SpacingSample,
    candidates: &[Ensemble],
    margin: f64,
) -> Result<Classification> {
    if candidates.is_empty() {
        return invalid("no candidate ensembles");
    }
    if sample.len() < MIN_CLASSIFY_SAMPLE {
        return Err(Error::SampleSize {
            needed: MIN_CLASSIFY_SAMPLE,
            got: sample.len(),
        });
    }
    let (best, lead) = KsReport::compute(sample)?.ranking(candidates);
    Ok(if lead >= margin {
        best.into()
    } else {
        Classification::Ambiguous
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmtstats::surmise::surmise_quantile;

    fn quantile_sample(e: Ensemble, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| surmise_quantile(e, (i as f64 - 0.5) / n as f64).unwrap())
            .collect()
    }

    #[test]
    fn mid_quantiles_give_half_a_step() {
        for e in Ensemble::ALL {
            let s = SpacingSample::new(quantile_sample(e, 100), vec![]).unwrap();
            assert!((ks_statistic(&s, e).unwrap() - 0.005).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_sample_is_an_error() {
        let s = SpacingSample::default();
        assert!(matches!(ks_statistic(&s, Ensemble::Gue), Err(Error::SampleSize { .. })));
    }

    #[test]
    fn single_spacing_histogram() {
        let s = SpacingSample::new(vec![0.5], vec![]).unwrap();
        let h = spacing_histogram(&s, 1.0, 2.0).unwrap();
        assert_eq!(h, vec![(0.5, 1.0), (1.5, 0.0)]);
    }

    #[test]
    fn small_samples_are_not_classified() {
        let s = SpacingSample::new(vec![1.0; 99], vec![]).unwrap();
        assert!(matches!(classify(&s, 0.02), Err(Error::SampleSize { .. })));
    }

    #[test]
    fn poisson_gue_mixture_is_ambiguous_between_the_two() {
        let mut mix = quantile_sample(Ensemble::Poisson, 50);
        mix.extend(quantile_sample(Ensemble::Gue, 50));
        let s = SpacingSample::new(mix, vec![]).unwrap();
        let pair = [Ensemble::Poisson, Ensemble::Gue];
        assert_eq!(classify_among(&s, &pair, 0.02).unwrap(), Classification::Ambiguous);
        // the even mixture sits closest to the intermediate GOE curve
        assert_eq!(classify(&s, 0.02).unwrap(), Classification::Goe);
    }

    #[test]
    fn pooling_keeps_provenance() {
        let p = |id: &str| Provenance {
            model_id: id.into(),
            n_up: Some(1),
            level_count: 3,
            discarded_count: 0,
        };
        let a = SpacingSample::new(vec![1.0, 2.0], vec![p("a")]).unwrap();
        let b = SpacingSample::new(vec![0.5], vec![p("b")]).unwrap();
        let pooled = SpacingSample::pool([&a, &b]);
        assert_eq!(pooled.spacings(), &[1.0, 2.0, 0.5]);
        assert_eq!(pooled.provenance().len(), 2);
    }
}
