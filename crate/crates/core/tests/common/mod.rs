#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use nesslsd::lindblad::{random_hermitian, BathSpec, ChainModel, SectorBasis};
use nesslsd::spinops::ChainSpec;

/// Chain of `n` sites with random anisotropy, fields, coupling and admissible
/// driving.
pub fn random_model<R: Rng>(n: usize, rng: &mut R) -> ChainModel {
    let delta = rng.random_range(-2.0..2.0);
    let field = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let gamma = rng.random_range(0.1..2.0);
    let mu: f64 = rng.random_range(-0.9..0.9);
    let room = 1.0 - mu.abs();
    let mu_bar = rng.random_range(-room..room);
    let dephasing = if rng.random_bool(0.5) {
        rng.random_range(0.0..1.0)
    } else {
        0.0
    };
    ChainModel::new(
        ChainSpec::new(n, delta, field).unwrap(),
        BathSpec::new(gamma, mu, mu_bar, dephasing).unwrap(),
    )
}

pub fn model(n: usize, delta: f64, gamma: f64, mu: f64, mu_bar: f64, dephasing: f64) -> ChainModel {
    ChainModel::new(
        ChainSpec::uniform(n, delta).unwrap(),
        BathSpec::new(gamma, mu, mu_bar, dephasing).unwrap(),
    )
}

/// Random Hermitian operator that is block diagonal in the up-spin count.
pub fn random_sector_hermitian<R: Rng>(basis: &SectorBasis, rng: &mut R) -> DMatrix<C64> {
    let full = random_hermitian(1 << basis.n(), rng);
    let (coeffs, _) = basis.extract(&full).unwrap();
    basis.embed(&coeffs).unwrap()
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
