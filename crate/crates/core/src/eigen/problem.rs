use crate::error::Result;
use crate::lindblad::{ChainModel, Liouvillian, SectorBasis};
use crate::sparse::SparseComplexMatrix;

/// A Liouvillian restricted to the zero magnetization-difference sector,
/// assembled once and shared by the steady-state and decay-mode solvers.
#[derive(Debug, Clone)]
pub struct SectorProblem {
    liouvillian: Liouvillian,
    basis: SectorBasis,
    matrix: SparseComplexMatrix,
}

impl SectorProblem {
    pub fn new(model: &ChainModel) -> Result<Self> {
        Self::from_liouvillian(Liouvillian::new(model)?)
    }

    pub fn from_liouvillian(liouvillian: Liouvillian) -> Result<Self> {
        let basis = SectorBasis::new(liouvillian.n())?;
        let matrix = liouvillian.sector_matrix(&basis)?;
        Ok(Self {
            liouvillian,
            basis,
            matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        &self.liouvillian
    }

    pub fn matrix(&self) -> &SparseComplexMatrix {
        &self.matrix
    }

    /// `‖L̂ x‖ / ‖x‖`.
    pub fn relative_residual(&self, coeffs: &[num_complex::Complex64]) -> f64 {
        let lx = self.matrix.mul_vec(coeffs);
        let num = lx.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let den = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        num / den
    }

    /// Mean decay rate on the diagonal of the sector matrix, used as the
    /// uniform damping of the preconditioner.
    pub fn mean_damping(&self) -> f64 {
        let diag = self.matrix.diagonal();
        let mean = -diag.iter().map(|d| d.re).sum::<f64>() / diag.len() as f64;
        if mean > 0.0 {
            mean
        } else {
            1.0
        }
    }
}
