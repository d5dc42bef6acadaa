//! Steady states and Hermitian decay modes of the sector Liouvillian, plus
//! dense oracles and block spectra of the resulting density operators.

pub mod dense;
mod decay;
mod density;
pub mod krylov;
mod ness;
mod precond;
mod problem;
mod spectrum;

pub use decay::{
    dense_decay_modes, dense_null_space_oracle, dense_null_space_oracle_for,
    dense_sector_eigenvalues, find_decay_modes, find_decay_modes_with, leading_eigenvalues,
    sector_singular_values, DecayOptions, DENSE_MAX_SITES, KERNEL_TOL, REALNESS_TOL,
    SEPARATION_TOL, STEADY_TOL,
};
pub use density::{DensityOperator, ModeKind};
pub use ness::{
    find_ness, find_ness_with, NessMethod, NessOptions, NessSolution, UNIQUENESS_SEED,
    UNIQUENESS_THRESHOLD, ZERO_RITZ_TOL,
};
pub use precond::CommutatorPreconditioner;
pub use problem::SectorProblem;
pub use spectrum::{block_spectrum, Spectrum, SpectrumSource, DEFAULT_ZERO_CUTOFF};
