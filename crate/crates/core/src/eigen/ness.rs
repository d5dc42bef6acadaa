use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::density::{hermitian_part, DensityOperator, ModeKind};
use super::krylov::{gmres, krylov_schur, EigOptions, GmresOptions};
use super::precond::CommutatorPreconditioner;
use super::problem::SectorProblem;
use crate::error::{invalid, Error, Result};
use crate::lindblad::{ChainModel, SectorBasis};

/// Seed of the random starting point used by the uniqueness check.
pub const UNIQUENESS_SEED: u64 = 0x5eed_0002;
/// Two solves from different starts differing by more than this trace
/// distance signal a degenerate steady state.
pub const UNIQUENESS_THRESHOLD: f64 = 1e-6;
/// Ritz values this close to zero count as steady states in the Krylov-Schur
/// route.
pub const ZERO_RITZ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NessMethod {
    /// Preconditioned GMRES on `L̂ x = -L̂ ρ∞` with `ρ = ρ∞ + x`.
    Gmres,
    /// Krylov-Schur for the eigenvalue of largest real part.
    KrylovSchur,
}

#[derive(Debug, Clone, Copy)]
pub struct NessOptions {
    pub tol: f64,
    /// Budget of sector matrix-vector products per solve.
    pub max_iter: usize,
    pub method: NessMethod,
    pub restart: usize,
    pub check_uniqueness: bool,
    pub seed: u64,
}

impl Default for NessOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            method: NessMethod::Gmres,
            restart: 80,
            check_uniqueness: true,
            seed: UNIQUENESS_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NessSolution {
    pub rho: DensityOperator,
    /// `‖L̂ρ‖ / ‖ρ‖` of the returned operator.
    pub residual: f64,
    pub matvecs: usize,
}

/// Steady state with the default solver settings.
pub fn find_ness(model: &ChainModel, tol: f64, max_iter: usize) -> Result<DensityOperator> {
    let problem = SectorProblem::new(model)?;
    let opts = NessOptions {
        tol,
        max_iter,
        ..NessOptions::default()
    };
    Ok(find_ness_with(&problem, &opts)?.rho)
}

pub fn find_ness_with(problem: &SectorProblem, opts: &NessOptions) -> Result<NessSolution> {
    if !(opts.tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {}", opts.tol));
    }
    match opts.method {
        NessMethod::Gmres => ness_gmres(problem, opts),
        NessMethod::KrylovSchur => ness_krylov_schur(problem, opts),
    }
}

fn normalize(basis: &SectorBasis, coeffs: &[C64]) -> Result<Vec<C64>> {
    let herm = hermitian_part(basis, coeffs)?;
    let tr = basis.trace(&herm).re;
    if tr.abs() < f64::MIN_POSITIVE {
        return Err(Error::Degeneracy(
            "steady-state candidate has vanishing trace".into(),
        ));
    }
    Ok(herm.iter().map(|c| c / tr).collect())
}

/// Solves `L̂ x = -L̂ start` and returns the trace-normalized `start + x`.
fn solve_from(
    problem: &SectorProblem,
    precond: &CommutatorPreconditioner,
    start: &[C64],
    opts: &NessOptions,
) -> Result<(Vec<C64>, f64, usize)> {
    let basis = problem.basis();
    let scale = 1.0 / (basis.blocks().iter().map(|b| b.dim()).sum::<usize>() as f64).sqrt();
    let mut rhs = problem.matrix().mul_vec(start);
    rhs.iter_mut().for_each(|v| *v = -*v);
    let mut matvecs = 1;
    let mut target = 0.5 * opts.tol * scale;
    let mut x0 = None;
    for _ in 0..4 {
        let out = gmres(
            problem.matrix(),
            precond,
            &rhs,
            x0.take(),
            &GmresOptions {
                tol: target,
                restart: opts.restart,
                max_matvecs: opts.max_iter.saturating_sub(matvecs),
            },
        )?;
        matvecs += out.matvecs;
        let rho: Vec<C64> = start.iter().zip(&out.x).map(|(s, x)| s + x).collect();
        let rho = normalize(basis, &rho)?;
        let residual = problem.relative_residual(&rho);
        matvecs += 1;
        if residual < opts.tol {
            return Ok((rho, residual, matvecs));
        }
        if !out.converged {
            return Err(Error::Convergence {
                iterations: matvecs,
                best_residual: residual,
            });
        }
        target *= 0.1;
        x0 = Some(out.x);
    }
    Err(Error::Convergence {
        iterations: matvecs,
        best_residual: problem.relative_residual(start),
    })
}

fn ness_gmres(problem: &SectorProblem, opts: &NessOptions) -> Result<NessSolution> {
    let basis = problem.basis();
    let precond = CommutatorPreconditioner::new(
        problem.liouvillian().hamiltonian(),
        basis,
        problem.mean_damping(),
    )?;
    let mixed = basis.maximally_mixed();
    let (coeffs, residual, mut matvecs) = solve_from(problem, &precond, &mixed, opts)?;
    let rho = DensityOperator::new(problem.n(), coeffs, C64::new(0.0, 0.0), ModeKind::Ness)?;

    if opts.check_uniqueness {
        let start = random_start(basis, opts.seed)?;
        let (other, _, used) = solve_from(problem, &precond, &start, opts)?;
        matvecs += used;
        let other = DensityOperator::new(problem.n(), other, C64::new(0.0, 0.0), ModeKind::Ness)?;
        let distance = rho.trace_distance(&other)?;
        if distance > UNIQUENESS_THRESHOLD {
            return Err(Error::Degeneracy(format!(
                "steady states reached from two starting points differ by trace distance {distance:.3e}"
            )));
        }
    }
    Ok(NessSolution {
        rho,
        residual,
        matvecs,
    })
}

/// `ρ∞ + R` with `R` a random traceless Hermitian operator of the same
/// Frobenius norm as `ρ∞`.
fn random_start(basis: &SectorBasis, seed: u64) -> Result<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<C64> = (0..basis.len())
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let mut r = hermitian_part(basis, &raw)?;
    let dim: usize = basis.blocks().iter().map(|b| b.dim()).sum();
    let shift = basis.trace(&r) / dim as f64;
    for b in basis.blocks() {
        for k in 0..b.dim() {
            r[b.offset + k * b.dim() + k] -= shift;
        }
    }
    let norm = r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let target = 1.0 / (dim as f64).sqrt();
    let mixed = basis.maximally_mixed();
    Ok(mixed
        .iter()
        .zip(&r)
        .map(|(m, v)| m + v * (target / norm))
        .collect())
}

fn ness_krylov_schur(problem: &SectorProblem, opts: &NessOptions) -> Result<NessSolution> {
    let dim = problem.dim();
    if dim < 4 {
        return invalid("Krylov-Schur steady-state search needs a sector of dimension at least 4");
    }
    let out = krylov_schur(
        problem.matrix(),
        &EigOptions {
            nev: 2,
            ncv: 30.min(dim - 1),
            tol: opts.tol,
            max_matvecs: opts.max_iter,
            seed: opts.seed,
        },
    )?;
    let lead = &out.pairs[0];
    if !out.all_converged() {
        return Err(Error::Convergence {
            iterations: out.matvecs,
            best_residual: lead.residual,
        });
    }
    if opts.check_uniqueness && out.pairs[1].value.norm() < ZERO_RITZ_TOL {
        return Err(Error::Degeneracy(format!(
            "two Ritz values near zero: {} and {}",
            lead.value, out.pairs[1].value
        )));
    }
    let basis = problem.basis();
    let tr = basis.trace(&lead.vector);
    let rotated: Vec<C64> = lead.vector.iter().map(|v| v / tr).collect();
    let coeffs = normalize(basis, &rotated)?;
    let residual = problem.relative_residual(&coeffs);
    if residual >= opts.tol {
        return Err(Error::Convergence {
            iterations: out.matvecs,
            best_residual: residual,
        });
    }
    Ok(NessSolution {
        rho: DensityOperator::new(problem.n(), coeffs, C64::new(0.0, 0.0), ModeKind::Ness)?,
        residual,
        matvecs: out.matvecs,
    })
}
