//! The zero magnetization-difference sector: operators spanned by `|i⟩⟨j|`
//! with equal up-spin counts. It splits into one `C(n, N↑) × C(n, N↑)` block
//! per up-count, stored consecutively in ascending `N↑`; inside a block the
//! pair `(i, j)` sits at `rank(i) * dim + rank(j)`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::eigen::DensityOperator;
use crate::error::{invalid, Error, Result};
use crate::spinops::{hilbert_dim, up_count};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Offset of block `n_up` inside a sector vector.
pub fn block_offset(n: usize, n_up: usize) -> usize {
    (0..n_up).map(|z| binomial(n, z).pow(2)).sum()
}

/// Basis states with exactly `n_up` up spins, ascending.
pub fn block_states(n: usize, n_up: usize) -> Vec<usize> {
    (0..hilbert_dim(n)).filter(|&s| up_count(s, n) == n_up).collect()
}

#[derive(Debug, Clone)]
pub struct SectorBlock {
    pub n_up: usize,
    pub states: Vec<usize>,
    pub offset: usize,
}

impl SectorBlock {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn len(&self) -> usize {
        self.states.len() * self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SectorBasis {
    n: usize,
    blocks: Vec<SectorBlock>,
    rank: Vec<u32>,
    len: usize,
}

impl SectorBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 16 {
            return invalid(format!("sector basis supports 1..=16 sites, got {n}"));
        }
        let dim = hilbert_dim(n);
        let mut rank = vec![0u32; dim];
        let mut blocks = Vec::with_capacity(n + 1);
        let mut offset = 0;
        for n_up in 0..=n {
            let states = block_states(n, n_up);
            for (r, &s) in states.iter().enumerate() {
                rank[s] = r as u32;
            }
            let len = states.len() * states.len();
            blocks.push(SectorBlock {
                n_up,
                states,
                offset,
            });
            offset += len;
        }
        Ok(Self {
            n,
            blocks,
            rank,
            len: offset,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> &[SectorBlock] {
        &self.blocks
    }

    pub fn block(&self, n_up: usize) -> Result<&SectorBlock> {
        self.blocks.get(n_up).ok_or_else(|| {
            Error::InvalidArgument(format!("up-count {n_up} outside 0..={}", self.n))
        })
    }

    pub fn block_offsets(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.offset).collect()
    }

    #[inline]
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let z = up_count(i, self.n);
        if z != up_count(j, self.n) {
            return None;
        }
        let b = &self.blocks[z];
        Some(b.offset + self.rank[i] as usize * b.dim() + self.rank[j] as usize)
    }

    pub fn pair_at(&self, index: usize) -> (usize, usize) {
        let z = self.blocks.partition_point(|b| b.offset <= index) - 1;
        let b = &self.blocks[z];
        let local = index - b.offset;
        (b.states[local / b.dim()], b.states[local % b.dim()])
    }

    /// Every `(i, j)` label in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocks.iter().flat_map(|b| {
            b.states
                .iter()
                .flat_map(move |&i| b.states.iter().map(move |&j| (i, j)))
        })
    }

    fn check_len(&self, coeffs: &[C64]) -> Result<()> {
        if coeffs.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                got: coeffs.len(),
            });
        }
        Ok(())
    }

    /// Full `2^n × 2^n` operator from sector coefficients.
    pub fn embed(&self, coeffs: &[C64]) -> Result<DMatrix<C64>> {
        self.check_len(coeffs)?;
        let dim = hilbert_dim(self.n);
        let mut m = DMatrix::zeros(dim, dim);
        for ((i, j), &c) in self.pairs().zip(coeffs) {
            m[(i, j)] = c;
        }
        Ok(m)
    }

    /// Sector coefficients of `rho` together with the Frobenius norm of the
    /// part of `rho` lying outside the sector.
    pub fn extract(&self, rho: &DMatrix<C64>) -> Result<(Vec<C64>, f64)> {
        let dim = hilbert_dim(self.n);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.nrows(),
            });
        }
        let coeffs: Vec<C64> = self.pairs().map(|(i, j)| rho[(i, j)]).collect();
        let mut outside = 0.0;
        for j in 0..dim {
            for i in 0..dim {
                if up_count(i, self.n) != up_count(j, self.n) {
                    outside += rho[(i, j)].norm_sqr();
                }
            }
        }
        Ok((coeffs, outside.sqrt()))
    }

    /// Coefficients of the adjoint operator.
    pub fn adjoint(&self, coeffs: &[C64]) -> Result<Vec<C64>> {
        self.check_len(coeffs)?;
        let mut out = vec![C64::new(0.0, 0.0); self.len];
        for b in &self.blocks {
            let d = b.dim();
            for r in 0..d {
                for c in 0..d {
                    out[b.offset + c * d + r] = coeffs[b.offset + r * d + c].conj();
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self, coeffs: &[C64]) -> C64 {
        self.blocks
            .iter()
            .flat_map(|b| (0..b.dim()).map(move |r| b.offset + r * b.dim() + r))
            .map(|k| coeffs[k])
            .sum()
    }

    /// Coefficients of the maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.len];
        let w = C64::new(1.0 / hilbert_dim(self.n) as f64, 0.0);
        for b in &self.blocks {
            for r in 0..b.dim() {
                out[b.offset + r * b.dim() + r] = w;
            }
        }
        out
    }
}

/// The fixed-`N↑` block of a density operator as a dense matrix, rows and
/// columns in ascending basis-state order.
pub fn magnetization_block(rho: &DensityOperator, n_up: usize) -> Result<DMatrix<C64>> {
    let n = rho.n();
    if n_up > n {
        return invalid(format!("up-count {n_up} outside 0..={n}"));
    }
    let d = binomial(n, n_up);
    let off = block_offset(n, n_up);
    let coeffs = rho.coefficients();
    if coeffs.len() < off + d * d {
        return Err(Error::DimensionMismatch {
            expected: binomial(2 * n, n),
            got: coeffs.len(),
        });
    }
    Ok(DMatrix::from_row_slice(d, d, &coeffs[off..off + d * d]))
}
