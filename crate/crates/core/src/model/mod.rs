//! The quench Hamiltonian, its dissipative channels and dense spectra.

mod eigen;
mod hamiltonian;

pub use eigen::{dense_eigensystem, dense_eigensystem_with_cap, EigenSystem, DEFAULT_DENSE_CAP};
pub use hamiltonian::{build_hamiltonian, jump_operators, ModelParams};
