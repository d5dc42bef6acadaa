//! Approximate inverse of the sector Liouvillian built from the coherent part
//! alone. In each fixed-`N↑` block the Hamiltonian is diagonalized once,
//! `H = U E Uᵀ`, and the dissipator is replaced by a uniform damping `c`:
//! `X ↦ U [(UᵀXU)_ab / (-i(E_a - E_b) - c)] Uᵀ`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::krylov::Preconditioner;
use crate::error::{invalid, Result};
use crate::lindblad::SectorBasis;
use crate::sparse::SparseComplexMatrix;

struct BlockFactor {
    offset: usize,
    u: DMatrix<f64>,
    energies: Vec<f64>,
}

pub struct CommutatorPreconditioner {
    blocks: Vec<BlockFactor>,
    damping: f64,
    len: usize,
}

impl CommutatorPreconditioner {
    /// `hamiltonian` must be real and conserve `N↑`; `damping` must be positive.
    pub fn new(hamiltonian: &SparseComplexMatrix, basis: &SectorBasis, damping: f64) -> Result<Self> {
        if !(damping > 0.0 && damping.is_finite()) {
            return invalid(format!("damping must be positive, got {damping}"));
        }
        let mut blocks = Vec::with_capacity(basis.blocks().len());
        for b in basis.blocks() {
            let d = b.dim();
            let mut h = DMatrix::<f64>::zeros(d, d);
            for (r, &s) in b.states.iter().enumerate() {
                let (cols, vals) = hamiltonian.row(s);
                for (&t, v) in cols.iter().zip(vals) {
                    if v.im.abs() > 1e-14 {
                        return invalid("preconditioner needs a real Hamiltonian");
                    }
                    match b.states.binary_search(&t) {
                        Ok(c) => h[(r, c)] = v.re,
                        Err(_) => {
                            return invalid("Hamiltonian does not conserve the up-spin count")
                        }
                    }
                }
            }
            let eig = SymmetricEigen::new(h);
            blocks.push(BlockFactor {
                offset: b.offset,
                u: eig.eigenvectors,
                energies: eig.eigenvalues.iter().copied().collect(),
            });
        }
        Ok(Self {
            blocks,
            damping,
            len: basis.len(),
        })
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }
}

impl Preconditioner for CommutatorPreconditioner {
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.len, "preconditioner input length");
        let results: Vec<(usize, Vec<C64>)> = self
            .blocks
            .par_iter()
            .map(|blk| {
                let d = blk.energies.len();
                let src = &x[blk.offset..blk.offset + d * d];
                let re = DMatrix::from_row_iterator(d, d, src.iter().map(|z| z.re));
                let im = DMatrix::from_row_iterator(d, d, src.iter().map(|z| z.im));
                let u = &blk.u;
                let mut tr = u.tr_mul(&re) * u;
                let mut ti = u.tr_mul(&im) * u;
                for a in 0..d {
                    for b in 0..d {
                        let z = C64::new(tr[(a, b)], ti[(a, b)])
                            / C64::new(-self.damping, blk.energies[b] - blk.energies[a]);
                        tr[(a, b)] = z.re;
                        ti[(a, b)] = z.im;
                    }
                }
                let br = u * tr * u.transpose();
                let bi = u * ti * u.transpose();
                let mut out = Vec::with_capacity(d * d);
                for r in 0..d {
                    for c in 0..d {
                        out.push(C64::new(br[(r, c)], bi[(r, c)]));
                    }
                }
                (blk.offset, out)
            })
            .collect();
        for (offset, out) in results {
            y[offset..offset + out.len()].copy_from_slice(&out);
        }
    }
}
