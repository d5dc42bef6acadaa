use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::dense::{eig_sorted_by_real, eigenvalues};
use super::density::{fix_mode_phase, hermitian_part, DensityOperator, ModeKind};
use super::krylov::{dot, krylov_schur, norm, EigOptions, EigOutcome, RitzPair};
use super::problem::SectorProblem;
use crate::error::{invalid, Error, Result};
use crate::lindblad::ChainModel;

/// `|Im Λ|` below this counts as real.
pub const REALNESS_TOL: f64 = 1e-9;
/// Minimum distance to every other Ritz value for a mode to count as
/// nondegenerate.
pub const SEPARATION_TOL: f64 = 1e-9;
/// Eigenvalues with `|Λ|` below this belong to the steady state.
pub const STEADY_TOL: f64 = 1e-8;
/// Largest chain handled by the dense oracles.
pub const DENSE_MAX_SITES: usize = 5;

const DECAY_SEED: u64 = 0x5eed_0003;
/// Mixed into the seed of the second, independent search that exposes
/// degenerate eigenvalues.
const PROBE_SEED: u64 = 0x5eed_0005;
/// Ritz vectors of a simple eigenvalue from two independent searches must
/// agree up to phase to within this.
const OVERLAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct DecayOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50_000,
            seed: DECAY_SEED,
        }
    }
}

fn subspace_size(dim: usize, k: usize) -> usize {
    (6 * k).max(40).min(dim - 1)
}

/// The `count` eigenvalues of the sector Liouvillian with the largest real
/// parts (the steady state included), by Krylov-Schur.
pub fn leading_eigenvalues(
    problem: &SectorProblem,
    count: usize,
    opts: &DecayOptions,
) -> Result<Vec<C64>> {
    let dim = problem.dim();
    if count == 0 || count + 1 >= dim {
        return invalid(format!(
            "cannot extract {count} eigenvalues from a sector of dimension {dim}"
        ));
    }
    let out = krylov_schur(
        problem.matrix(),
        &EigOptions {
            nev: count,
            ncv: subspace_size(dim, count).max(count + 1),
            tol: opts.tol,
            max_matvecs: opts.max_iter,
            seed: opts.seed,
        },
    )?;
    if !out.all_converged() {
        let worst = out.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        return Err(Error::Convergence {
            iterations: out.matvecs,
            best_residual: worst,
        });
    }
    Ok(out.pairs.iter().map(|p| p.value).collect())
}

fn qualifies(value: C64, others: &[C64], own: usize) -> bool {
    value.norm() > STEADY_TOL
        && value.im.abs() < REALNESS_TOL
        && value.re < 0.0
        && others
            .iter()
            .enumerate()
            .all(|(j, o)| j == own || (o - value).norm() > SEPARATION_TOL)
}

/// The `k` Hermitian decay modes with the largest real eigenvalues `Λ < 0`.
pub fn find_decay_modes(
    model: &ChainModel,
    k: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<DensityOperator>> {
    let problem = SectorProblem::new(model)?;
    find_decay_modes_with(
        &problem,
        k,
        &DecayOptions {
            tol,
            max_iter,
            ..DecayOptions::default()
        },
    )
}

pub fn find_decay_modes_with(
    problem: &SectorProblem,
    k: usize,
    opts: &DecayOptions,
) -> Result<Vec<DensityOperator>> {
    if k == 0 {
        return invalid("number of decay modes must be at least 1");
    }
    if !(opts.tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {}", opts.tol));
    }
    let dim = problem.dim();
    if dim < 3 {
        return Err(Error::PartialModes {
            wanted: k,
            found: Vec::new(),
        });
    }
    let mut ncv = subspace_size(dim, k);
    let mut nev = (k + 4).min(ncv - 1);
    let search = |nev: usize, ncv: usize, seed: u64| {
        krylov_schur(
            problem.matrix(),
            &EigOptions {
                nev,
                ncv,
                tol: opts.tol,
                max_matvecs: opts.max_iter,
                seed,
            },
        )
    };
    loop {
        let out = search(nev, ncv, opts.seed)?;
        let prefix = out.pairs.iter().take_while(|p| p.converged).count();
        if prefix == 0 {
            return Err(Error::Convergence {
                iterations: out.matvecs,
                best_residual: out.pairs[0].residual,
            });
        }
        let stalled = prefix < nev && out.matvecs >= opts.max_iter;
        let exhausted = nev + 1 >= ncv && ncv + 1 >= dim;
        let values: Vec<C64> = out.pairs.iter().map(|p| p.value).collect();
        let mut selected: Vec<usize> = (0..prefix)
            .filter(|&i| qualifies(values[i], &values, i))
            .collect();
        // A Krylov space grown from one vector holds a single direction of
        // each eigenspace, so multiplicity is invisible in the Ritz values.
        // A second start vector gives a different direction when it exists.
        if !selected.is_empty() && (selected.len() >= k || exhausted) {
            let probe = search(nev, ncv, opts.seed ^ PROBE_SEED)?;
            selected.retain(|&i| is_simple(&out.pairs[i], &probe));
        }
        selected.truncate(k);
        if selected.len() == k {
            let basis = problem.basis();
            return selected
                .into_iter()
                .map(|i| {
                    let coeffs = fix_mode_phase(basis, &out.pairs[i].vector)?;
                    DensityOperator::new(problem.n(), coeffs, values[i], ModeKind::Hdm)
                })
                .collect();
        }
        if stalled {
            return Err(Error::Convergence {
                iterations: out.matvecs,
                best_residual: out.pairs[prefix].residual,
            });
        }
        if exhausted {
            return Err(Error::PartialModes {
                wanted: k,
                found: selected.iter().map(|&i| values[i].re).collect(),
            });
        }
        if nev + 1 >= ncv {
            ncv = (2 * ncv).min(dim - 1);
        }
        nev = (nev + k + 2).min(ncv - 1);
    }
}

fn is_simple(pair: &RitzPair, probe: &EigOutcome) -> bool {
    let scale = 1.0 + pair.value.norm();
    probe
        .pairs
        .iter()
        .filter(|p| p.converged && (p.value - pair.value).norm() < 1e-6 * scale)
        .any(|p| {
            let overlap = dot(&pair.vector, &p.vector).norm();
            overlap >= (1.0 - OVERLAP_TOL) * norm(&pair.vector) * norm(&p.vector)
        })
}

fn check_dense_size(n: usize) -> Result<()> {
    if n > DENSE_MAX_SITES {
        return invalid(format!(
            "dense oracles are limited to n <= {DENSE_MAX_SITES}, got {n}"
        ));
    }
    Ok(())
}

/// Every eigenvalue of the sector Liouvillian by dense Schur decomposition,
/// sorted by descending real part.
pub fn dense_sector_eigenvalues(problem: &SectorProblem) -> Result<Vec<C64>> {
    check_dense_size(problem.n())?;
    let mut vals = eigenvalues(&problem.matrix().to_dense())?;
    vals.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    Ok(vals)
}

/// Dense counterpart of [`find_decay_modes_with`] using the full
/// eigendecomposition of the sector matrix.
pub fn dense_decay_modes(problem: &SectorProblem, k: usize) -> Result<Vec<DensityOperator>> {
    check_dense_size(problem.n())?;
    let (values, vectors) = eig_sorted_by_real(&problem.matrix().to_dense())?;
    let basis = problem.basis();
    let mut out = Vec::with_capacity(k);
    for i in 0..values.len() {
        if out.len() == k {
            break;
        }
        if qualifies(values[i], &values, i) {
            let v: Vec<C64> = vectors.column(i).iter().copied().collect();
            let coeffs = fix_mode_phase(basis, &v)?;
            out.push(DensityOperator::new(problem.n(), coeffs, values[i], ModeKind::Hdm)?);
        }
    }
    if out.len() < k {
        return Err(Error::PartialModes {
            wanted: k,
            found: out.iter().map(|m| m.lambda().re).collect(),
        });
    }
    Ok(out)
}

/// Singular values of the dense sector matrix, descending.
pub fn sector_singular_values(problem: &SectorProblem) -> Result<Vec<f64>> {
    check_dense_size(problem.n())?;
    let svd = problem.matrix().to_dense().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Relative singular-value threshold defining the numerical kernel.
pub const KERNEL_TOL: f64 = 1e-9;

/// Steady state from the right singular vector of the smallest singular
/// value of the dense sector matrix.
pub fn dense_null_space_oracle(model: &ChainModel) -> Result<DensityOperator> {
    dense_null_space_oracle_for(&SectorProblem::new(model)?)
}

pub fn dense_null_space_oracle_for(problem: &SectorProblem) -> Result<DensityOperator> {
    check_dense_size(problem.n())?;
    let dense: DMatrix<C64> = problem.matrix().to_dense();
    let svd = dense.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::DenseEigen("SVD returned no right singular vectors".into()))?;
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let kernel = s.iter().filter(|&&x| x <= KERNEL_TOL * smax).count();
    if kernel != 1 {
        return Err(Error::Degeneracy(format!(
            "sector matrix has a {kernel}-dimensional numerical kernel"
        )));
    }
    let idx = s.imin();
    let v: Vec<C64> = v_t.row(idx).iter().map(|z| z.conj()).collect();
    let basis = problem.basis();
    let tr = basis.trace(&v);
    let scaled: Vec<C64> = v.iter().map(|x| x / tr).collect();
    let herm = hermitian_part(basis, &scaled)?;
    let t = basis.trace(&herm).re;
    let coeffs = herm.iter().map(|x| x / t).collect();
    DensityOperator::new(problem.n(), coeffs, C64::new(0.0, 0.0), ModeKind::Ness)
}
