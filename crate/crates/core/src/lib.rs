//! Boundary-driven XXZ spin chains in Lindblad form: sector Liouvillians,
//! non-equilibrium steady states, Hermitian decay modes and the level-spacing
//! statistics of their fixed-magnetization blocks.

pub mod eigen;
pub mod error;
pub mod experiment;
pub mod lindblad;
pub mod rmtstats;
pub mod sparse;
pub mod spinops;

pub use error::{Error, Result};
