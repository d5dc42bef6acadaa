use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::surmise::Ensemble;
use crate::eigen::{Spectrum, SpectrumSource};
use crate::error::{invalid, Result};

pub const MIN_SYNTHETIC_DIM: usize = 50;

/// `count` independent level sequences of length `dim`: sorted uniform
/// variates for Poisson, Gaussian orthogonal or unitary matrix spectra
/// otherwise. Matrix `k` draws from its own stream of the seeded generator.
pub fn generate_synthetic(e: Ensemble, dim: usize, count: usize, seed: u64) -> Result<Vec<Spectrum>> {
    if dim < MIN_SYNTHETIC_DIM {
        return invalid(format!(
            "synthetic spectra need dim >= {MIN_SYNTHETIC_DIM}, got {dim}"
        ));
    }
    Ok((0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let values = match e {
                Ensemble::Poisson => (0..dim).map(|_| rng.random::<f64>()).collect(),
                Ensemble::Goe => {
                    let a = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
                    let h = (&a + a.transpose()) * 0.5;
                    h.symmetric_eigenvalues().iter().copied().collect()
                }
                Ensemble::Gue => {
                    let a = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
                        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    });
                    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
                    h.symmetric_eigenvalues().iter().copied().collect()
                }
            };
            Spectrum::new(values, 0, SpectrumSource::labelled(format!("{e}-{k}")))
        })
        .collect())
}
