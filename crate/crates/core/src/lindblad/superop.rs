use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::model::{build_jump_operators, ChainModel};
use super::sector::SectorBasis;
use crate::error::{Error, Result};
use crate::sparse::SparseComplexMatrix;
use crate::spinops::{build_hamiltonian, hilbert_dim};

const I: C64 = C64::new(0.0, 1.0);

/// `L̂ρ = -i[H, ρ] + Σ_μ (2 L_μ ρ L_μ† - {L_μ† L_μ, ρ})`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    n: usize,
    hamiltonian: SparseComplexMatrix,
    jumps: Vec<SparseComplexMatrix>,
    /// `Σ_μ L_μ† L_μ`
    decay: SparseComplexMatrix,
}

impl Liouvillian {
    pub fn new(model: &ChainModel) -> Result<Self> {
        let h = build_hamiltonian(&model.chain);
        let jumps = build_jump_operators(model)?
            .into_iter()
            .map(|j| j.matrix)
            .collect();
        Self::from_parts(model.n(), h, jumps)
    }

    pub fn from_parts(
        n: usize,
        hamiltonian: SparseComplexMatrix,
        jumps: Vec<SparseComplexMatrix>,
    ) -> Result<Self> {
        let dim = hilbert_dim(n);
        for m in std::iter::once(&hamiltonian).chain(&jumps) {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.rows(),
                });
            }
        }
        let mut decay = SparseComplexMatrix::zeros(dim, dim);
        for l in &jumps {
            decay = &decay + &(&l.adjoint() * l);
        }
        Ok(Self {
            n,
            hamiltonian,
            jumps,
            decay,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &SparseComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[SparseComplexMatrix] {
        &self.jumps
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let dim = hilbert_dim(self.n);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.nrows(),
            });
        }
        let h_rho = self.hamiltonian.mul_dense(rho)?;
        let rho_h = self.hamiltonian.left_mul_dense(rho)?;
        let k_rho = self.decay.mul_dense(rho)?;
        let rho_k = self.decay.left_mul_dense(rho)?;
        let mut out = (h_rho - rho_h) * (-I) - k_rho - rho_k;
        for l in &self.jumps {
            let l_rho = l.mul_dense(rho)?;
            out += l.adjoint().left_mul_dense(&l_rho)? * C64::new(2.0, 0.0);
        }
        Ok(out)
    }

    /// Matrix of `L̂` on the zero magnetization-difference sector, acting on
    /// coefficient vectors laid out as in [`SectorBasis`]. Assembled row by row:
    /// `(L̂ρ)_{ij} = Σ_k A_{ik} ρ_{kj} + Σ_l ρ_{il} B_{lj} + 2 Σ_μ Σ_{kl} L_{ik} ρ_{kl} conj(L_{jl})`
    /// with `A = -iH - K` and `B = iH - K`.
    pub fn sector_matrix(&self, basis: &SectorBasis) -> Result<SparseComplexMatrix> {
        if basis.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: basis.n(),
            });
        }
        let left = self
            .hamiltonian
            .axpby(-I, &self.decay, C64::new(-1.0, 0.0))?;
        let right_t = self
            .hamiltonian
            .axpby(I, &self.decay, C64::new(-1.0, 0.0))?
            .transpose();
        let jumps = &self.jumps;
        let dim = basis.len();
        Ok(SparseComplexMatrix::from_row_fn(dim, dim, |row, out| {
            let (i, j) = basis.pair_at(row);
            let (ks, av) = left.row(i);
            for (&k, &a) in ks.iter().zip(av) {
                if let Some(col) = basis.index_of(k, j) {
                    out.push((col, a));
                }
            }
            let (ls, bv) = right_t.row(j);
            for (&l, &b) in ls.iter().zip(bv) {
                if let Some(col) = basis.index_of(i, l) {
                    out.push((col, b));
                }
            }
            for lop in jumps {
                let (ks, kv) = lop.row(i);
                let (ls, lv) = lop.row(j);
                for (&k, &a) in ks.iter().zip(kv) {
                    for (&l, &b) in ls.iter().zip(lv) {
                        if let Some(col) = basis.index_of(k, l) {
                            out.push((col, 2.0 * a * b.conj()));
                        }
                    }
                }
            }
        }))
    }

    /// Full `4^n × 4^n` superoperator on row-major vectorized operators:
    /// `-i(H⊗I - I⊗Hᵀ) + Σ [2 L⊗L̄ - (L†L)⊗I - I⊗(L†L)ᵀ]`.
    pub fn kronecker_superoperator(&self) -> SparseComplexMatrix {
        let id = SparseComplexMatrix::identity(hilbert_dim(self.n));
        let h = &self.hamiltonian;
        let comm = &h.kron(&id) - &id.kron(&h.transpose());
        let mut out = comm.scale(-I);
        for l in &self.jumps {
            out = &out + &l.kron(&l.conj()).scale(C64::new(2.0, 0.0));
            let k = &l.adjoint() * l;
            out = &out - &k.kron(&id);
            out = &out - &id.kron(&k.transpose());
        }
        out
    }
}

pub fn apply_liouvillian(model: &ChainModel, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    Liouvillian::new(model)?.apply(rho)
}

pub fn build_superoperator_sector(
    model: &ChainModel,
    basis: &SectorBasis,
) -> Result<SparseComplexMatrix> {
    Liouvillian::new(model)?.sector_matrix(basis)
}
