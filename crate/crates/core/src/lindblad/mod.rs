//! Lindblad generators of boundary-driven chains and their restriction to the
//! zero magnetization-difference sector.

mod model;
mod sector;
mod superop;
mod symmetry;

pub use model::{build_jump_operators, BathSpec, ChainModel, JumpOperator};
pub use sector::{
    binomial, block_offset, block_states, magnetization_block, SectorBasis, SectorBlock,
};
pub use superop::{apply_liouvillian, build_superoperator_sector, Liouvillian};
pub use symmetry::{check_weak_symmetry, random_hermitian, SYMMETRY_PROBE_SEED};
