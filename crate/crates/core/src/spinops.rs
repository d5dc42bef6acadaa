//! Spin-1/2 chain operators in the computational basis.
//!
//! Basis convention: a basis state is an integer of `n` bits, site 1 being the
//! most significant bit. Bit value 0 is spin up, 1 is spin down, so basis
//! states are ordered lexicographically with ↑ before ↓ and site 1 varying
//! slowest. `Z = diag(+1, -1)` and `Plus` maps ↓ to ↑.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sparse::SparseComplexMatrix;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteOperatorKind {
    X,
    Y,
    Z,
    Plus,
    Minus,
    Identity,
}

impl SiteOperatorKind {
    /// 2x2 matrix in the (↑, ↓) basis, indexed `[row][col]`.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            Self::X => [[ZERO, ONE], [ONE, ZERO]],
            Self::Y => [[ZERO, -I], [I, ZERO]],
            Self::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Self::Plus => [[ZERO, ONE], [ZERO, ZERO]],
            Self::Minus => [[ZERO, ZERO], [ONE, ZERO]],
            Self::Identity => [[ONE, ZERO], [ZERO, ONE]],
        }
    }
}

/// Bit position of `site` (1-based) inside a basis state of `n` sites.
#[inline]
pub fn site_shift(site: usize, n: usize) -> usize {
    n - site
}

/// Whether `site` (1-based) is spin down in `state`.
#[inline]
pub fn is_down(state: usize, site: usize, n: usize) -> bool {
    (state >> site_shift(site, n)) & 1 == 1
}

/// Number of up spins in `state`.
#[inline]
pub fn up_count(state: usize, n: usize) -> usize {
    n - state.count_ones() as usize
}

pub fn hilbert_dim(n: usize) -> usize {
    1usize << n
}

/// XXZ chain with open boundaries and on-site z-fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    n: usize,
    delta: f64,
    field: Vec<f64>,
}

impl ChainSpec {
    pub fn new(n: usize, delta: f64, field: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return invalid(format!("chain needs at least 2 sites, got {n}"));
        }
        if n > 24 {
            return invalid(format!("chain of {n} sites exceeds the supported 24"));
        }
        if field.len() != n {
            return invalid(format!(
                "field has {} entries for a chain of {n} sites",
                field.len()
            ));
        }
        if !delta.is_finite() || field.iter().any(|b| !b.is_finite()) {
            return invalid("anisotropy and fields must be finite");
        }
        Ok(Self { n, delta, field })
    }

    /// Zero field.
    pub fn uniform(n: usize, delta: f64) -> Result<Self> {
        Self::new(n, delta, vec![0.0; n])
    }

    /// Period-3 staggered field, see [`staggered_field`].
    pub fn staggered(n: usize, delta: f64) -> Result<Self> {
        Self::new(n, delta, staggered_field(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn field(&self) -> &[f64] {
        &self.field
    }
}

/// Embeds a single-site operator at `site` (1-based) of an `n`-site chain.
pub fn site_operator(kind: SiteOperatorKind, site: usize, n: usize) -> Result<SparseComplexMatrix> {
    if n == 0 || n > 24 {
        return invalid(format!("site count {n} outside 1..=24"));
    }
    if site == 0 || site > n {
        return invalid(format!("site {site} outside 1..={n}"));
    }
    let m = kind.matrix();
    let shift = site_shift(site, n);
    let dim = hilbert_dim(n);
    let mut triplets = Vec::with_capacity(dim);
    for col in 0..dim {
        let b_in = (col >> shift) & 1;
        for b_out in 0..2 {
            let v = m[b_out][b_in];
            if v != ZERO {
                let row = (col & !(1 << shift)) | (b_out << shift);
                triplets.push((row, col, v));
            }
        }
    }
    SparseComplexMatrix::from_triplets(dim, dim, triplets)
}

/// `H = Σ_j (σˣσˣ + σʸσʸ + Δ σᶻσᶻ)_{j,j+1} + Σ_j b_j σᶻ_j`, assembled directly
/// on basis states: the flip-flop part moves antiparallel neighbours with
/// amplitude 2, the rest is diagonal.
pub fn build_hamiltonian(spec: &ChainSpec) -> SparseComplexMatrix {
    let n = spec.n;
    let dim = hilbert_dim(n);
    let mut triplets = Vec::new();
    for s in 0..dim {
        let mut diag = 0.0;
        for j in 1..n {
            let a = is_down(s, j, n);
            let b = is_down(s, j + 1, n);
            if a == b {
                diag += spec.delta;
            } else {
                diag -= spec.delta;
                let flipped = s ^ (1 << site_shift(j, n)) ^ (1 << site_shift(j + 1, n));
                triplets.push((flipped, s, C64::new(2.0, 0.0)));
            }
        }
        for (k, &b) in spec.field.iter().enumerate() {
            diag += if is_down(s, k + 1, n) { -b } else { b };
        }
        triplets.push((s, s, C64::new(diag, 0.0)));
    }
    SparseComplexMatrix::from_triplets(dim, dim, triplets).expect("indices are in range")
}

/// `b_{3j} = 0, b_{3j+1} = -1, b_{3j+2} = -1/2`, with site 1 taking `b_1 = -1`.
pub fn staggered_field(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|site| match site % 3 {
            1 => -1.0,
            2 => -0.5,
            _ => 0.0,
        })
        .collect()
}

/// Diagonal operator counting up spins.
pub fn total_up_count_operator(n: usize) -> SparseComplexMatrix {
    let diag: Vec<C64> = (0..hilbert_dim(n))
        .map(|s| C64::new(up_count(s, n) as f64, 0.0))
        .collect();
    SparseComplexMatrix::from_diagonal(&diag)
}

/// `exp(-i α N↑)`.
pub fn magnetization_rotation(n: usize, alpha: f64) -> SparseComplexMatrix {
    let diag: Vec<C64> = (0..hilbert_dim(n))
        .map(|s| C64::from_polar(1.0, -alpha * up_count(s, n) as f64))
        .collect();
    SparseComplexMatrix::from_diagonal(&diag)
}

/// Reverses the site order of a basis state.
pub fn reflect_state(state: usize, n: usize) -> usize {
    let mut out = 0;
    for k in 0..n {
        if (state >> k) & 1 == 1 {
            out |= 1 << (n - 1 - k);
        }
    }
    out
}

/// `P = X R`: reflect the chain, then flip every spin.
pub fn parity_operator(n: usize) -> SparseComplexMatrix {
    let dim = hilbert_dim(n);
    let mask = dim - 1;
    let triplets = (0..dim).map(|s| (reflect_state(s, n) ^ mask, s, ONE));
    SparseComplexMatrix::from_triplets(dim, dim, triplets).expect("permutation")
}

/// Unitary part `Z₂ = Π σᶻ_{2j}` of the antiunitary `T = Z₂ K`. For odd `n`
/// the product runs over the even sites that exist. Complex conjugation `K`
/// is left to the caller.
pub fn antiunitary_conjugator(n: usize) -> SparseComplexMatrix {
    let diag: Vec<C64> = (0..hilbert_dim(n))
        .map(|s| {
            let downs = (2..=n).step_by(2).filter(|&site| is_down(s, site, n)).count();
            if downs % 2 == 0 {
                ONE
            } else {
                -ONE
            }
        })
        .collect();
    SparseComplexMatrix::from_diagonal(&diag)
}
