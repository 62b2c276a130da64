//! Exact simulation of transverse-field Ising quenches: parity-resolved
//! sparse Hamiltonians, Krylov and spectral propagation, Lindblad dynamics,
//! quantum Fisher information, Loschmidt rate functions, Husimi
//! distributions and finite-size scaling analysis.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod protocol;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
