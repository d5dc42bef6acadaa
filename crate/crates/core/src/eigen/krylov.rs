//! Matrix-free Krylov solvers: restarted GMRES with right preconditioning and
//! a Krylov-Schur eigensolver targeting the largest real parts.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::dense::{schur, Givens};
use crate::error::{invalid, Result};
use crate::sparse::SparseComplexMatrix;

const ZERO: C64 = C64::new(0.0, 0.0);
const CHUNK: usize = 8192;

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for SparseComplexMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.mul_vec_into(x, y);
    }
}

pub trait Preconditioner: Sync {
    /// `y ≈ A⁻¹ x`.
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(x);
    }
}

/// `Σ conj(x_i) y_i`, summed in fixed chunks so the result is reproducible.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    let partial: Vec<C64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u.conj() * v).sum())
        .collect();
    partial.into_iter().sum()
}

pub fn norm(x: &[C64]) -> f64 {
    let partial: Vec<f64> = x
        .par_chunks(CHUNK)
        .map(|a| a.iter().map(|u| u.norm_sqr()).sum())
        .collect();
    partial.into_iter().sum::<f64>().sqrt()
}

fn scale_in_place(x: &mut [C64], s: f64) {
    x.par_iter_mut().for_each(|v| *v *= s);
}

/// Classical Gram-Schmidt with a second pass only when the first one removed
/// most of the norm; returns the projection coefficients.
fn orthogonalize(basis: &[Vec<C64>], w: &mut [C64]) -> Vec<C64> {
    let mut total = vec![ZERO; basis.len()];
    let mut before = norm(w);
    for _ in 0..2 {
        let h: Vec<C64> = basis.par_iter().map(|v| dot(v, w)).collect();
        w.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let start = c * CHUNK;
            let len = chunk.len();
            for (v, &hk) in basis.iter().zip(&h) {
                for (wi, vi) in chunk.iter_mut().zip(&v[start..start + len]) {
                    *wi -= hk * vi;
                }
            }
        });
        total.iter_mut().zip(&h).for_each(|(t, hk)| *t += hk);
        let after = norm(w);
        if after > std::f64::consts::FRAC_1_SQRT_2 * before {
            break;
        }
        before = after;
    }
    total
}

/// `Σ_k coeffs[k] basis[k]`.
fn combine(basis: &[Vec<C64>], coeffs: &[C64], out: &mut [C64]) {
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let start = c * CHUNK;
            let len = chunk.len();
        chunk.iter_mut().for_each(|v| *v = ZERO);
        for (v, &ck) in basis.iter().zip(coeffs) {
            for (o, vi) in chunk.iter_mut().zip(&v[start..start + len]) {
                *o += ck * vi;
            }
        }
    });
}

pub fn random_unit_vector(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let nv = norm(&v);
    scale_in_place(&mut v, 1.0 / nv);
    v
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    /// Absolute target for `‖b - A x‖`.
    pub tol: f64,
    pub restart: usize,
    pub max_matvecs: usize,
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub residual_norm: f64,
    pub matvecs: usize,
    pub converged: bool,
}

/// Restarted GMRES on `A M⁻¹ y = b`, `x = M⁻¹ y`, starting from `x0` (zero
/// when `None`). Convergence is judged on the true residual at each restart.
pub fn gmres<A: LinearOperator, M: Preconditioner>(
    a: &A,
    m: &M,
    b: &[C64],
    x0: Option<Vec<C64>>,
    opts: &GmresOptions,
) -> Result<GmresOutcome> {
    let n = a.dim();
    if b.len() != n {
        return invalid(format!("right-hand side has length {}, expected {n}", b.len()));
    }
    if opts.restart == 0 {
        return invalid("GMRES restart length must be positive");
    }
    let mut matvecs = 0;
    let mut x = x0.unwrap_or_else(|| vec![ZERO; n]);
    if x.len() != n {
        return invalid(format!("initial guess has length {}, expected {n}", x.len()));
    }
    let mut r = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    let mut z = vec![ZERO; n];
    let residual = |x: &[C64], r: &mut [C64], w: &mut [C64]| {
        a.apply(x, w);
        r.par_iter_mut()
            .zip(b.par_iter().zip(w.par_iter()))
            .for_each(|(ri, (bi, wi))| *ri = bi - wi);
    };
    if x.iter().any(|v| *v != ZERO) {
        residual(&x, &mut r, &mut w);
        matvecs += 1;
    } else {
        r.copy_from_slice(b);
    }
    let mut beta = norm(&r);

    loop {
        if beta <= opts.tol {
            return Ok(GmresOutcome {
                x,
                residual_norm: beta,
                matvecs,
                converged: true,
            });
        }
        if matvecs >= opts.max_matvecs {
            return Ok(GmresOutcome {
                x,
                residual_norm: beta,
                matvecs,
                converged: false,
            });
        }
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(opts.restart + 1);
        let mut v0 = r.clone();
        scale_in_place(&mut v0, 1.0 / beta);
        basis.push(v0);
        let mut rcols: Vec<Vec<C64>> = Vec::with_capacity(opts.restart);
        let mut rotations: Vec<Givens> = Vec::with_capacity(opts.restart);
        let mut g = vec![C64::new(beta, 0.0)];

        for j in 0..opts.restart {
            m.apply(&basis[j], &mut z);
            a.apply(&z, &mut w);
            matvecs += 1;
            let mut col = orthogonalize(&basis, &mut w);
            let hn = norm(&w);
            col.push(C64::new(hn, 0.0));
            for (i, rot) in rotations.iter().enumerate() {
                let (p, q) = rot.rotate(col[i], col[i + 1]);
                col[i] = p;
                col[i + 1] = q;
            }
            let rot = Givens::zeroing(col[j], col[j + 1]);
            let (p, _) = rot.rotate(col[j], col[j + 1]);
            col[j] = p;
            col[j + 1] = ZERO;
            let (gj, gj1) = rot.rotate(g[j], ZERO);
            g[j] = gj;
            g.push(gj1);
            rotations.push(rot);
            col.truncate(j + 1);
            rcols.push(col);

            let estimate = gj1.norm();
            if hn <= f64::EPSILON * beta || estimate <= 0.5 * opts.tol || matvecs >= opts.max_matvecs
            {
                break;
            }
            let mut next = w.clone();
            scale_in_place(&mut next, 1.0 / hn);
            basis.push(next);
        }

        // back substitution on the rotated Hessenberg matrix
        let k = rcols.len();
        let mut y = vec![ZERO; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for (jj, yj) in y.iter().enumerate().skip(i + 1) {
                acc -= rcols[jj][i] * yj;
            }
            y[i] = acc / rcols[i][i];
        }
        combine(&basis[..k], &y, &mut w);
        m.apply(&w, &mut z);
        x.par_iter_mut().zip(z.par_iter()).for_each(|(xi, zi)| *xi += zi);
        residual(&x, &mut r, &mut w);
        matvecs += 1;
        let new_beta = norm(&r);
        if !new_beta.is_finite() {
            return Ok(GmresOutcome {
                x,
                residual_norm: new_beta,
                matvecs,
                converged: false,
            });
        }
        beta = new_beta;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    pub nev: usize,
    pub ncv: usize,
    /// Residual target relative to the largest Ritz magnitude seen.
    pub tol: f64,
    pub max_matvecs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct EigOutcome {
    /// The `nev` Ritz pairs with the largest real parts, in descending order.
    pub pairs: Vec<RitzPair>,
    pub matvecs: usize,
    pub restarts: usize,
}

impl EigOutcome {
    pub fn all_converged(&self) -> bool {
        self.pairs.iter().all(|p| p.converged)
    }
}

/// Krylov-Schur iteration for the eigenvalues of largest real part.
pub fn krylov_schur<A: LinearOperator>(a: &A, opts: &EigOptions) -> Result<EigOutcome> {
    let n = a.dim();
    if opts.nev == 0 || opts.nev >= opts.ncv {
        return invalid(format!(
            "need 0 < nev < ncv, got nev = {} and ncv = {}",
            opts.nev, opts.ncv
        ));
    }
    if opts.ncv >= n {
        return invalid(format!(
            "subspace size {} must be below the operator dimension {n}",
            opts.ncv
        ));
    }
    let ncv = opts.ncv;
    let nev = opts.nev;
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(ncv + 1);
    basis.push(random_unit_vector(n, opts.seed));
    // projected matrix, (ncv + 1) x ncv
    let mut g = DMatrix::<C64>::zeros(ncv + 1, ncv);
    let mut kept = 0;
    let mut matvecs = 0;
    let mut restarts = 0;
    let mut scale = 0.0f64;
    let mut reseed = opts.seed;
    let mut w = vec![ZERO; n];

    loop {
        for j in kept..ncv {
            a.apply(&basis[j], &mut w);
            matvecs += 1;
            let h = orthogonalize(&basis, &mut w);
            for (i, hi) in h.iter().enumerate() {
                g[(i, j)] = *hi;
            }
            let beta = norm(&w);
            let col_scale = h.iter().map(|z| z.norm()).fold(beta, f64::max);
            if beta <= 1e-12 * col_scale.max(scale) {
                // invariant subspace: continue with a fresh orthogonal direction
                g[(j + 1, j)] = ZERO;
                loop {
                    reseed = reseed.wrapping_add(0x9e37_79b9);
                    let mut fresh = random_unit_vector(n, reseed);
                    orthogonalize(&basis, &mut fresh);
                    let nf = norm(&fresh);
                    if nf > 1e-8 {
                        scale_in_place(&mut fresh, 1.0 / nf);
                        basis.push(fresh);
                        break;
                    }
                }
            } else {
                g[(j + 1, j)] = C64::new(beta, 0.0);
                let mut next = w.clone();
                scale_in_place(&mut next, 1.0 / beta);
                basis.push(next);
            }
        }

        let b = g.view((0, 0), (ncv, ncv)).into_owned();
        let mut s = schur(&b)?;
        s.sort_by_key_desc(|z| z.re);
        let values = s.eigenvalues();
        scale = values.iter().map(|z| z.norm()).fold(scale, f64::max);
        let tail = g.row(ncv) * &s.q;
        let tri = s.triangular_eigenvectors();
        let residuals: Vec<f64> = (0..nev)
            .map(|i| (&tail * tri.column(i))[(0, 0)].norm())
            .collect();
        let threshold = opts.tol * scale.max(f64::MIN_POSITIVE);
        let done = residuals.iter().all(|&r| r <= threshold);

        if done || matvecs >= opts.max_matvecs {
            let coeffs = &s.q * tri.columns(0, nev);
            let pairs = (0..nev)
                .map(|i| {
                    let mut vector = vec![ZERO; n];
                    let c: Vec<C64> = coeffs.column(i).iter().copied().collect();
                    combine(&basis[..ncv], &c, &mut vector);
                    let nv = norm(&vector);
                    scale_in_place(&mut vector, 1.0 / nv);
                    RitzPair {
                        value: values[i],
                        vector,
                        residual: residuals[i],
                        converged: residuals[i] <= threshold,
                    }
                })
                .collect();
            return Ok(EigOutcome {
                pairs,
                matvecs,
                restarts,
            });
        }

        // truncate to the leading `kept` Schur vectors
        let converged = residuals.iter().filter(|&&r| r <= threshold).count();
        kept = (nev + converged + (ncv - nev) / 2).min(ncv - 1);
        let qk = s.q.columns(0, kept).into_owned();
        rotate_basis(&mut basis, &qk);
        let last = basis.pop().expect("basis holds ncv + 1 vectors");
        basis.truncate(kept);
        basis.push(last);
        g.fill(ZERO);
        for i in 0..kept {
            for j in i..kept {
                g[(i, j)] = s.t[(i, j)];
            }
            g[(kept, i)] = tail[(0, i)];
        }
        restarts += 1;
    }
}

/// Replaces the first `q.ncols()` basis vectors by `V Q`, a block of rows at
/// a time so each basis vector is streamed once.
fn rotate_basis(basis: &mut [Vec<C64>], q: &DMatrix<C64>) {
    const BLOCK: usize = 512;
    let (m, k) = q.shape();
    let n = basis[0].len();
    let blocks: Vec<Vec<C64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let len = BLOCK.min(n - start);
            let mut out = vec![ZERO; k * len];
            for (i, v) in basis[..m].iter().enumerate() {
                let vi = &v[start..start + len];
                for j in 0..k {
                    let c = q[(i, j)];
                    for (o, x) in out[j * len..(j + 1) * len].iter_mut().zip(vi) {
                        *o += c * x;
                    }
                }
            }
            out
        })
        .collect();
    for (b, out) in blocks.iter().enumerate() {
        let start = b * BLOCK;
        let len = out.len() / k;
        for (j, slot) in basis[..k].iter_mut().enumerate() {
            slot[start..start + len].copy_from_slice(&out[j * len..(j + 1) * len]);
        }
    }
}
