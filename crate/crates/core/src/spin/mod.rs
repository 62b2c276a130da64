//! Computational basis, Pauli algebra, sparse operators and state vectors for
//! chains of spin-1/2 particles.
//!
//! Bit convention: bit `l` of a basis label is site `l`; a 0 bit is spin up
//! (sigma^z = +1), a 1 bit is spin down.

mod basis;
mod collective;
mod direction;
mod operator;
mod pauli;
mod state;

pub use basis::{build_basis, build_basis_with_cap, Parity, Sector, SpinBasis, DEFAULT_MAX_SITES};
pub use collective::{
    apply_collective_full, collective_spin, collective_spin_squared, pauli_site,
    sz_squared_diagonal,
};
pub use direction::BlochDirection;
pub use operator::{apply, SparseOperator};
pub use pauli::{Axis, PauliString, PauliSum};
pub use state::StateVector;
