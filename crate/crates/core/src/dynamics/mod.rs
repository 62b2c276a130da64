//! Initial-state preparation and time propagation, closed and open.

mod density;
mod expm;
mod initial;
mod krylov;
mod lindblad;
mod propagate;
mod spectral;
mod translation;

pub use density::{DensityMatrix, RhoSpectrum, DEFAULT_DENSITY_CAP};
pub use expm::{expm_propagate, matrix_exp};
pub use initial::{initial_sector, initial_state};
pub use krylov::{evolve_krylov, evolve_krylov_with, KrylovPropagator};
pub use lindblad::{lindblad_evolve, lindblad_evolve_with, LindbladConfig, LindbladGenerator};
pub use propagate::{propagate, propagate_with, time_grid, Method, PropagatorConfig};
pub use spectral::{evolve_spectral, overlap_coefficients, SpectralPropagator};
