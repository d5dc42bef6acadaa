use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::unfold::UnfoldedSpectrum;
use crate::error::{invalid, Result};

pub const NUMBER_VARIANCE_SEED: u64 = 0x5eed_0004;

/// `Σ²(L)`: variance of the number of unfolded levels in windows of length
/// `l` placed at random inside the unfolded range.
pub fn number_variance(u: &UnfoldedSpectrum, l: f64, window_count: usize) -> Result<f64> {
    number_variance_pooled(&[u], l, window_count, NUMBER_VARIANCE_SEED)
}

/// Windows are spread over several spectra in proportion to their spans and
/// the counts pooled before taking the variance.
pub fn number_variance_pooled(
    spectra: &[&UnfoldedSpectrum],
    l: f64,
    window_count: usize,
    seed: u64,
) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        return invalid(format!("window length must be positive, got {l}"));
    }
    if window_count < 2 {
        return invalid("need at least two windows");
    }
    if spectra.is_empty() {
        return invalid("no spectra given");
    }
    let spans: Vec<f64> = spectra.iter().map(|u| u.span()).collect();
    for s in &spans {
        if l > s / 3.0 {
            return invalid(format!(
                "window length {l} exceeds a third of the unfolded span {s}"
            ));
        }
    }
    let total: f64 = spans.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(window_count);
    let mut assigned = 0;
    for (k, (u, span)) in spectra.iter().zip(&spans).enumerate() {
        let share = if k + 1 == spectra.len() {
            window_count - assigned
        } else {
            (((span / total) * window_count as f64).round() as usize).min(window_count - assigned)
        };
        assigned += share;
        let levels = u.levels();
        let lo = levels[0];
        for _ in 0..share {
            let x = lo + rng.random::<f64>() * (span - l);
            let a = levels.partition_point(|&v| v < x);
            let b = levels.partition_point(|&v| v < x + l);
            counts.push((b - a) as f64);
        }
    }
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    Ok(counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0))
}
