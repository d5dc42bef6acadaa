use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::model::ChainModel;
use super::superop::Liouvillian;
use crate::error::{invalid, Result};
use crate::sparse::SparseComplexMatrix;

/// Seed of the probe states used by [`check_weak_symmetry`].
pub const SYMMETRY_PROBE_SEED: u64 = 0x5eed_0001;

/// Hermitian matrix with independent standard-normal real and imaginary parts.
pub fn random_hermitian<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        let d: f64 = StandardNormal.sample(rng);
        m[(r, r)] = C64::new(d, 0.0);
        for c in r + 1..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(r, c)] = C64::new(re, im);
            m[(c, r)] = C64::new(re, -im);
        }
    }
    m
}

/// Whether `U` is a weak symmetry: `U L̂(ρ) U† = L̂(U ρ U†)` for `trials`
/// seeded random Hermitian probes, each to relative accuracy `tol`.
pub fn check_weak_symmetry(
    model: &ChainModel,
    u: &SparseComplexMatrix,
    trials: usize,
    tol: f64,
) -> Result<bool> {
    let liou = Liouvillian::new(model)?;
    let dim = 1usize << model.n();
    if u.rows() != dim || u.cols() != dim {
        return invalid(format!(
            "symmetry operator is {}x{}, chain needs {dim}x{dim}",
            u.rows(),
            u.cols()
        ));
    }
    let unitarity = (&u.adjoint() * u).max_abs_diff(&SparseComplexMatrix::identity(dim));
    if unitarity > tol {
        return invalid(format!("operator is not unitary (max |U†U - I| = {unitarity:.3e})"));
    }
    let u_adj = u.adjoint();
    let conj = |m: &DMatrix<C64>| -> Result<DMatrix<C64>> { u_adj.left_mul_dense(&u.mul_dense(m)?) };
    let mut rng = ChaCha8Rng::seed_from_u64(SYMMETRY_PROBE_SEED);
    for _ in 0..trials {
        let rho = random_hermitian(dim, &mut rng);
        let l_rho = liou.apply(&rho)?;
        let lhs = conj(&l_rho)?;
        let rhs = liou.apply(&conj(&rho)?)?;
        if (lhs - rhs).norm() >= tol * l_rho.norm() {
            return Ok(false);
        }
    }
    Ok(true)
}
