use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::dense::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::lindblad::{binomial, magnetization_block, SectorBasis};
use crate::sparse::SparseComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    Ness,
    Hdm,
}

/// A Hermitian operator on the zero magnetization-difference sector: either
/// the steady state (unit trace) or a decay mode (unit Frobenius norm).
#[derive(Debug, Clone)]
pub struct DensityOperator {
    n: usize,
    coefficients: Vec<C64>,
    lambda: C64,
    kind: ModeKind,
}

impl DensityOperator {
    pub fn new(n: usize, coefficients: Vec<C64>, lambda: C64, kind: ModeKind) -> Result<Self> {
        let expected = binomial(2 * n, n);
        if coefficients.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coefficients.len(),
            });
        }
        Ok(Self {
            n,
            coefficients,
            lambda,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    fn basis(&self) -> Result<SectorBasis> {
        SectorBasis::new(self.n)
    }

    pub fn trace(&self) -> Result<C64> {
        Ok(self.basis()?.trace(&self.coefficients))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        let adj = self.basis()?.adjoint(&self.coefficients)?;
        Ok(self
            .coefficients
            .iter()
            .zip(&adj)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn block(&self, n_up: usize) -> Result<DMatrix<C64>> {
        magnetization_block(self, n_up)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.basis()?.embed(&self.coefficients)
    }

    /// Ascending eigenvalues of every block, concatenated in block order.
    pub fn block_eigenvalues(&self) -> Result<Vec<Vec<f64>>> {
        (0..=self.n)
            .map(|z| Ok(hermitian_eigenvalues(&self.block(z)?)))
            .collect()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .block_eigenvalues()?
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }

    /// `½ ‖ρ - σ‖₁`, computed block by block.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut total = 0.0;
        for z in 0..=self.n {
            let diff = self.block(z)? - other.block(z)?;
            total += hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>();
        }
        Ok(0.5 * total)
    }

    /// `tr(ρ O)`; entries of `O` outside the sector do not contribute.
    pub fn expectation(&self, op: &SparseComplexMatrix) -> Result<C64> {
        let basis = self.basis()?;
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..op.rows() {
            let (cols, vals) = op.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if let Some(k) = basis.index_of(c, r) {
                    acc += v * self.coefficients[k];
                }
            }
        }
        Ok(acc)
    }
}

/// `(x + x†) / 2`.
pub(crate) fn hermitian_part(basis: &SectorBasis, coeffs: &[C64]) -> Result<Vec<C64>> {
    let adj = basis.adjoint(coeffs)?;
    Ok(coeffs.iter().zip(&adj).map(|(a, b)| (a + b) * 0.5).collect())
}

/// Fixes the free phase of an eigenvector of a Hermiticity-preserving map
/// with real eigenvalue, so that it becomes Hermitian: rotate by
/// `e^{-i arg(tr x²)/2}`, pick the sign making the largest diagonal entry
/// positive, symmetrize and normalize to unit Frobenius norm.
pub(crate) fn fix_mode_phase(basis: &SectorBasis, coeffs: &[C64]) -> Result<Vec<C64>> {
    let adj = basis.adjoint(coeffs)?;
    // tr(x²) = Σ_ij x_ij x_ji = Σ_k x_k conj(adj_k)
    let tr_sq: C64 = coeffs.iter().zip(&adj).map(|(a, b)| a * b.conj()).sum();
    let phase = C64::from_polar(1.0, -0.5 * tr_sq.arg());
    let mut rotated: Vec<C64> = coeffs.iter().map(|c| c * phase).collect();
    let mut best = C64::new(0.0, 0.0);
    for b in basis.blocks() {
        for r in 0..b.dim() {
            let d = rotated[b.offset + r * b.dim() + r];
            if d.re.abs() > best.re.abs() {
                best = d;
            }
        }
    }
    if best.re < 0.0 {
        rotated.iter_mut().for_each(|c| *c = -*c);
    }
    let mut herm = hermitian_part(basis, &rotated)?;
    let norm = herm.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        herm.iter_mut().for_each(|c| *c /= norm);
    }
    Ok(herm)
}
