//! Dense complex eigensolvers.
//!
//! General matrices go through Householder reduction to Hessenberg form and
//! single-shift QR sweeps (Wilkinson shifts, Givens rotations) to a complex
//! Schur form `A = Q T Q†`. The Schur form can be reordered by adjacent swaps,
//! which the Krylov-Schur restart relies on. Hermitian matrices use nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Unitary `Q` and upper-triangular `T` with `A = Q T Q†`.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with real `c` such that
/// `G (x, y)ᵀ = (r, 0)ᵀ`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    pub(crate) fn rotate(&self, a: C64, b: C64) -> (C64, C64) {
        (a * self.c + self.s * b, -self.s.conj() * a + b * self.c)
    }

    pub(crate) fn zeroing(x: C64, y: C64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Self { c: 0.0, s: ONE };
        }
        let r = ax.hypot(ay);
        Self {
            c: ax / r,
            s: (x / ax) * y.conj() / r,
        }
    }

    /// Rows `p, p+1` ← `G` applied from the left, columns in `cols`.
    fn rotate_rows(&self, m: &mut DMatrix<C64>, p: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(p, j)];
            let b = m[(p + 1, j)];
            m[(p, j)] = a * self.c + self.s * b;
            m[(p + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `p, p+1` ← right multiplication by `G†`, rows in `rows`.
    fn rotate_cols(&self, m: &mut DMatrix<C64>, p: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, p)];
            let b = m[(i, p + 1)];
            m[(i, p)] = a * self.c + b * self.s.conj();
            m[(i, p + 1)] = -a * self.s + b * self.c;
        }
    }
}

/// Householder reduction `A = Q H Q†` with `H` upper Hessenberg.
pub fn hessenberg(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = DMatrix::<C64>::identity(n, n);
    if n < 3 {
        return (q, h);
    }
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut v: Vec<C64> = (0..len).map(|r| h[(k + 1 + r, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            ONE
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);

        // H ← (I - 2vv†) H
        for j in 0..n {
            let mut dot = ZERO;
            for r in 0..len {
                dot += v[r].conj() * h[(k + 1 + r, j)];
            }
            let dot = dot * 2.0;
            for r in 0..len {
                h[(k + 1 + r, j)] -= v[r] * dot;
            }
        }
        // H ← H (I - 2vv†), Q ← Q (I - 2vv†)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = ZERO;
                for r in 0..len {
                    dot += m[(i, k + 1 + r)] * v[r];
                }
                let dot = dot * 2.0;
                for r in 0..len {
                    m[(i, k + 1 + r)] -= dot * v[r].conj();
                }
            }
        }
        for r in 1..len {
            h[(k + 1 + r, k)] = ZERO;
        }
    }
    (q, h)
}

/// Complex Schur decomposition of a square matrix.
pub fn schur(a: &DMatrix<C64>) -> Result<ComplexSchur> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DenseEigen(format!(
            "Schur form needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DenseEigen("matrix has non-finite entries".into()));
    }
    let (mut q, mut t) = hessenberg(a);
    if n < 2 {
        return Ok(ComplexSchur { q, t });
    }
    let eps = f64::EPSILON;
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = f64::MIN_POSITIVE * (n as f64) / eps;
    let max_sweeps = 60 * n;

    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let diag = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let reference = if diag == 0.0 { scale } else { diag };
            if sub <= eps * reference || sub <= tiny {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_sweeps {
            return Err(Error::DenseEigen(format!(
                "QR iteration did not converge for a {n}x{n} matrix"
            )));
        }

        let shift = if iter % 10 == 0 {
            // exceptional shift
            t[(hi, hi)] + C64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        let mut x = t[(lo, lo)] - shift;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            let g = Givens::zeroing(x, y);
            let first_col = if k > lo { k - 1 } else { lo };
            g.rotate_rows(&mut t, k, first_col..n);
            g.rotate_cols(&mut t, k, 0..(k + 3).min(hi + 1));
            g.rotate_cols(&mut q, k, 0..n);
            if k > lo {
                t[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = ZERO;
        }
    }
    Ok(ComplexSchur { q, t })
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

impl ComplexSchur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Exchanges the diagonal entries `k` and `k+1` by a unitary similarity.
    pub fn swap(&mut self, k: usize) {
        let n = self.t.nrows();
        let a = self.t[(k, k)];
        let b = self.t[(k, k + 1)];
        let c = self.t[(k + 1, k + 1)];
        if a == c {
            return;
        }
        let g = Givens::zeroing(b, c - a);
        g.rotate_rows(&mut self.t, k, k..n);
        g.rotate_cols(&mut self.t, k, 0..k + 2);
        g.rotate_cols(&mut self.q, k, 0..n);
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = c;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Reorders the Schur form so that the diagonal is sorted by `key`
    /// descending (stable for equal keys).
    pub fn sort_by_key_desc(&mut self, key: impl Fn(C64) -> f64) {
        let n = self.t.nrows();
        for i in 0..n {
            let mut best = i;
            for j in i + 1..n {
                if key(self.t[(j, j)]) > key(self.t[(best, best)]) {
                    best = j;
                }
            }
            for j in (i..best).rev() {
                self.swap(j);
            }
        }
    }

    /// Unit eigenvectors of the triangular factor, one per column.
    pub fn triangular_eigenvectors(&self) -> DMatrix<C64> {
        triangular_eigenvectors(&self.t)
    }

    /// Unit eigenvectors of the original matrix, one per column, in the order
    /// of the diagonal of `t`.
    pub fn eigenvectors(&self) -> DMatrix<C64> {
        let mut v = &self.q * self.triangular_eigenvectors();
        for mut col in v.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= C64::new(norm, 0.0);
            }
        }
        v
    }
}

pub fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let smin = scale * f64::EPSILON;
    let mut x = DMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for m in j + 1..=k {
                acc += t[(j, m)] * x[(m, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < smin {
                denom = C64::new(smin, 0.0);
            }
            x[(j, k)] = -acc / denom;
        }
        let norm = x.column(k).norm();
        x.column_mut(k).unscale_mut(norm);
    }
    x
}

/// All eigenvalues of a general complex matrix, in Schur order.
pub fn eigenvalues(a: &DMatrix<C64>) -> Result<Vec<C64>> {
    Ok(schur(a)?.eigenvalues())
}

/// Eigenvalues sorted by descending real part and their unit eigenvectors.
pub fn eig_sorted_by_real(a: &DMatrix<C64>) -> Result<(Vec<C64>, DMatrix<C64>)> {
    let mut s = schur(a)?;
    s.sort_by_key_desc(|z| z.re);
    Ok((s.eigenvalues(), s.eigenvectors()))
}

/// Ascending eigenvalues of a Hermitian matrix (the Hermitian part is used).
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut vals: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn assert_schur_valid(a: &DMatrix<C64>, s: &ComplexSchur, tol: f64) {
        let n = a.nrows();
        let id = DMatrix::<C64>::identity(n, n);
        assert!((s.q.adjoint() * &s.q - id).camax() < tol);
        let recon = &s.q * &s.t * s.q.adjoint();
        assert!((recon - a).camax() < tol * a.camax().max(1.0), "reconstruction");
        for j in 0..n {
            for i in j + 1..n {
                assert_eq!(s.t[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn hessenberg_is_a_similarity() {
        let a = random_matrix(9, 1);
        let (q, h) = hessenberg(&a);
        assert!((&q * &h * q.adjoint() - &a).camax() < 1e-13);
        for j in 0..9 {
            for i in j + 2..9 {
                assert!(h[(i, j)].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn schur_of_random_matrices() {
        for (n, seed) in [(1, 0), (2, 1), (3, 2), (10, 3), (40, 4), (80, 5)] {
            let a = random_matrix(n, seed);
            let s = schur(&a).unwrap();
            assert_schur_valid(&a, &s, 1e-11);
        }
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let a = random_matrix(30, 7);
        let (vals, vecs) = eig_sorted_by_real(&a).unwrap();
        for k in 0..30 {
            let v = vecs.column(k);
            let r = &a * v - v * vals[k];
            assert!(r.norm() < 1e-11, "residual {}", r.norm());
            if k > 0 {
                assert!(vals[k - 1].re >= vals[k].re);
            }
        }
    }

    #[test]
    fn known_spectrum_with_degeneracy() {
        // diag(3, 1, 1, -2) conjugated by a random unitary
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            ONE,
            ONE,
            C64::new(-2.0, 0.0),
        ]));
        let qr = random_matrix(4, 11).qr();
        let u = qr.q();
        let a = &u * d * u.adjoint();
        let mut vals = eigenvalues(&a).unwrap();
        vals.sort_by(|x, y| y.re.total_cmp(&x.re));
        for (got, want) in vals.iter().zip([3.0, 1.0, 1.0, -2.0]) {
            assert!((got - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reordering_preserves_the_decomposition() {
        let a = random_matrix(25, 13);
        let mut s = schur(&a).unwrap();
        s.sort_by_key_desc(|z| z.re);
        assert_schur_valid(&a, &s, 1e-11);
        let vals = s.eigenvalues();
        assert!(vals.windows(2).all(|w| w[0].re >= w[1].re));
    }

    #[test]
    fn hermitian_eigenvalues_match_general_solver() {
        let a = random_matrix(12, 17);
        let h = &a + a.adjoint();
        let herm = hermitian_eigenvalues(&h);
        let mut general: Vec<f64> = eigenvalues(&h).unwrap().iter().map(|z| z.re).collect();
        general.sort_by(|x, y| x.total_cmp(y));
        for (x, y) in herm.iter().zip(&general) {
            assert!((x - y).abs() < 1e-11);
        }
    }
}
