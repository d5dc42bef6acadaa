//! Compressed-row complex sparse matrices.
//!
//! The representation is canonical: column indices are strictly increasing
//! within each row and no explicit zeros are stored, so two matrices with the
//! same entries compare equal with `==`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Rows above which a product is split across the rayon pool.
const PAR_ROWS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseComplexMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut row_ptr = Vec::with_capacity(diag.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (i, &d) in diag.iter().enumerate() {
            if d != C64::new(0.0, 0.0) {
                col_idx.push(i);
                values.push(d);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows: diag.len(),
            cols: diag.len(),
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and entries that cancel to exactly zero are dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut per_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return invalid(format!(
                    "triplet ({r}, {c}) outside a {rows}x{cols} matrix"
                ));
            }
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut entries in per_row {
            push_canonical_row(&mut entries, &mut col_idx, &mut values);
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles a matrix row by row. `row_fn` fills the (unsorted, possibly
    /// duplicated) entries of one row; the result is canonicalized. Rows are
    /// produced in parallel chunks and concatenated in order, so the result
    /// does not depend on the thread count.
    pub(crate) fn from_row_fn<F>(rows: usize, cols: usize, row_fn: F) -> Self
    where
        F: Fn(usize, &mut Vec<(usize, C64)>) + Sync,
    {
        const CHUNK: usize = 4096;
        let chunks: Vec<(Vec<usize>, Vec<usize>, Vec<C64>)> = (0..rows.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let start = chunk * CHUNK;
                let end = (start + CHUNK).min(rows);
                let mut lens = Vec::with_capacity(end - start);
                let mut cols_out = Vec::new();
                let mut vals_out = Vec::new();
                let mut scratch = Vec::new();
                for r in start..end {
                    scratch.clear();
                    row_fn(r, &mut scratch);
                    let before = cols_out.len();
                    push_canonical_row(&mut scratch, &mut cols_out, &mut vals_out);
                    lens.push(cols_out.len() - before);
                }
                (lens, cols_out, vals_out)
            })
            .collect();

        let nnz = chunks.iter().map(|c| c.1.len()).sum();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for (lens, c, v) in chunks {
            for len in lens {
                let last = *row_ptr.last().unwrap();
                row_ptr.push(last + len);
            }
            col_idx.extend(c);
            values.extend(v);
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut row_ptr = Vec::with_capacity(m.nrows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[C64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols, "matvec input length");
        assert_eq!(y.len(), self.rows, "matvec output length");
        let row_dot = |r: usize| -> C64 {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals)
                .fold(C64::new(0.0, 0.0), |acc, (&c, &v)| acc + v * x[c])
        };
        if self.rows >= PAR_ROWS {
            y.par_chunks_mut(4096).enumerate().for_each(|(k, chunk)| {
                let base = k * 4096;
                for (i, out) in chunk.iter_mut().enumerate() {
                    *out = row_dot(base + i);
                }
            });
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = row_dot(r);
            }
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![C64::new(0.0, 0.0); self.nnz()];
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                col_idx[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == C64::new(0.0, 0.0) {
            return Self::zeros(self.rows, self.cols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.drop_zeros();
        out
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return;
        }
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    /// Linear combination `a*self + b*other`.
    pub fn axpby(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Self::from_row_fn(self.rows, self.cols, |r, out| {
            let (c1, v1) = self.row(r);
            out.extend(c1.iter().zip(v1).map(|(&c, &v)| (c, a * v)));
            let (c2, v2) = other.row(r);
            out.extend(c2.iter().zip(v2).map(|(&c, &v)| (c, b * v)));
        }))
    }

    /// Sparse-sparse product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        Ok(Self::from_row_fn(self.rows, other.cols, |r, out| {
            let (ca, va) = self.row(r);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                out.extend(cb.iter().zip(vb).map(|(&c, &b)| (c, a * b)));
            }
        }))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_row_fn(rows, cols, |r, out| {
            let (ra, rb) = (r / other.rows, r % other.rows);
            let (ca, va) = self.row(ra);
            let (cb, vb) = other.row(rb);
            for (&i, &a) in ca.iter().zip(va) {
                for (&j, &b) in cb.iter().zip(vb) {
                    out.push((i * other.cols + j, a * b));
                }
            }
        })
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// `self * dense`.
    pub fn mul_dense(&self, dense: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if self.cols != dense.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: dense.nrows(),
            });
        }
        let mut out = DMatrix::zeros(self.rows, dense.ncols());
        for (r, k, v) in self.triplets() {
            for c in 0..dense.ncols() {
                out[(r, c)] += v * dense[(k, c)];
            }
        }
        Ok(out)
    }

    /// `dense * self`.
    pub fn left_mul_dense(&self, dense: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if dense.ncols() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: dense.ncols(),
            });
        }
        let mut out = DMatrix::zeros(dense.nrows(), self.cols);
        for (k, c, v) in self.triplets() {
            for r in 0..dense.nrows() {
                out[(r, c)] += dense[(r, k)] * v;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.axpby(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0)) {
            Ok(d) => d.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }
}

fn push_canonical_row(entries: &mut [(usize, C64)], cols: &mut Vec<usize>, vals: &mut Vec<C64>) {
    entries.sort_unstable_by_key(|e| e.0);
    let mut k = 0;
    while k < entries.len() {
        let c = entries[k].0;
        let mut v = entries[k].1;
        k += 1;
        while k < entries.len() && entries[k].0 == c {
            v += entries[k].1;
            k += 1;
        }
        if v != C64::new(0.0, 0.0) {
            cols.push(c);
            vals.push(v);
        }
    }
}

impl Mul for &SparseComplexMatrix {
    type Output = SparseComplexMatrix;

    fn mul(self, rhs: Self) -> SparseComplexMatrix {
        self.matmul(rhs).expect("sparse product dimension mismatch")
    }
}

impl Add for &SparseComplexMatrix {
    type Output = SparseComplexMatrix;

    fn add(self, rhs: Self) -> SparseComplexMatrix {
        self.axpby(C64::new(1.0, 0.0), rhs, C64::new(1.0, 0.0))
            .expect("sparse sum dimension mismatch")
    }
}

impl Sub for &SparseComplexMatrix {
    type Output = SparseComplexMatrix;

    fn sub(self, rhs: Self) -> SparseComplexMatrix {
        self.axpby(C64::new(1.0, 0.0), rhs, C64::new(-1.0, 0.0))
            .expect("sparse difference dimension mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_cancellations() {
        let m = SparseComplexMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 1, c(1.0, 0.0)),
                (0, 1, c(2.0, 1.0)),
                (1, 0, c(1.0, 0.0)),
                (1, 0, c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn out_of_bounds_triplet_rejected() {
        let err = SparseComplexMatrix::from_triplets(2, 2, vec![(2, 0, c(1.0, 0.0))]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn canonical_equality_ignores_insertion_order() {
        let a = SparseComplexMatrix::from_triplets(
            3,
            3,
            vec![(2, 2, c(1.0, 0.0)), (0, 1, c(0.0, 1.0)), (0, 0, c(5.0, 0.0))],
        )
        .unwrap();
        let b = SparseComplexMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, c(5.0, 0.0)), (2, 2, c(1.0, 0.0)), (0, 1, c(0.0, 1.0))],
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kron_matches_block_layout() {
        let a = SparseComplexMatrix::from_dense(&DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        ));
        let id = SparseComplexMatrix::identity(2);
        let k = a.kron(&id).to_dense();
        assert_eq!(k[(0, 2)], c(2.0, 0.0));
        assert_eq!(k[(1, 3)], c(2.0, 0.0));
        assert_eq!(k[(3, 3)], c(0.0, 1.0));
        assert_eq!(k[(0, 1)], c(0.0, 0.0));
    }

    fn small_matrix(dim: usize) -> impl Strategy<Value = SparseComplexMatrix> {
        proptest::collection::vec(
            (0..dim, 0..dim, -3i32..=3, -3i32..=3),
            0..(dim * dim),
        )
        .prop_map(move |entries| {
            SparseComplexMatrix::from_triplets(
                dim,
                dim,
                entries
                    .into_iter()
                    .map(|(r, c, re, im)| (r, c, C64::new(re as f64, im as f64))),
            )
            .unwrap()
        })
    }

    proptest! {
        // Every dimension up to 16 against dense nalgebra products.
        #[test]
        fn sparse_algebra_matches_dense(
            (dim, a, b, x) in (1usize..=16).prop_flat_map(|dim| (
                Just(dim),
                small_matrix(dim),
                small_matrix(dim),
                proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), dim),
            ))
        ) {
            let (da, db) = (a.to_dense(), b.to_dense());
            let prod = (&a * &b).to_dense();
            prop_assert!((prod - &da * &db).camax() < 1e-12);
            let sum = (&a + &b).to_dense();
            prop_assert!((sum - (&da + &db)).camax() < 1e-12);
            let x: Vec<C64> = x.into_iter().map(|(re, im)| C64::new(re, im)).collect();
            let y = a.mul_vec(&x);
            let dy = &da * nalgebra::DVector::from_vec(x.clone());
            for i in 0..dim {
                prop_assert!((y[i] - dy[i]).norm() < 1e-12);
            }
            prop_assert!((a.adjoint().to_dense() - da.adjoint()).camax() == 0.0);
            let lm = a.left_mul_dense(&db).unwrap();
            prop_assert!((lm - &db * &da).camax() < 1e-12);
            let rm = a.mul_dense(&db).unwrap();
            prop_assert!((rm - &da * &db).camax() < 1e-12);
        }
    }
}
