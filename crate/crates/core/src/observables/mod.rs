//! Fisher information, echoes, spectral QFI split, phase-space
//! distributions and entanglement certificates.

mod decomposition;
mod depth;
mod husimi;
mod mixed;
mod qfi;
mod rate;

pub use decomposition::{qfi_decomposition, sz_squared_in_eigenbasis, QfiDecomposition};
pub use depth::{entanglement_depth, producible_bound, DepthConvention, EntanglementCertificate, CERTIFICATE_MARGIN};
pub use husimi::{
    down_count_amplitudes, husimi, husimi_with_cap, HusimiGrid, DEFAULT_HUSIMI_CAP, DEFAULT_HUSIMI_NODES,
    POLAR_CAP_ANGLE,
};
pub use mixed::{qfi_mixed, qfi_mixed_optimal, qfi_mixed_with_spectrum, POSITIVITY_TOL, WEIGHT_FLOOR};
pub use qfi::{covariance_matrix, qfi_optimal, qfi_pure, OptimalQfi, QfiSample, NORM_TOL};
pub use rate::{rate_from_echo, rate_function, RateSample, ECHO_FLOOR};
