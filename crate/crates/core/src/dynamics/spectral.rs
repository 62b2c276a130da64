use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::EigenSystem;
use crate::spin::StateVector;

fn check_dims(eig: &EigenSystem, psi: &StateVector) -> Result<()> {
    if eig.basis.as_ref() != psi.basis().as_ref() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// `C_n = <phi_n|psi_0>` for every eigenvector.
pub fn overlap_coefficients(eig: &EigenSystem, psi0: &StateVector) -> Result<Array1<Complex64>> {
    check_dims(eig, psi0)?;
    let psi = Array1::from(psi0.amplitudes().to_vec());
    Ok(eig.vectors.t().mapv(|z| z.conj()).dot(&psi))
}

/// Caches the overlaps of one initial state so states at many times cost a
/// single dense matrix-vector product each.
pub struct SpectralPropagator<'a> {
    eig: &'a EigenSystem,
    coefficients: Array1<Complex64>,
    basis: std::sync::Arc<crate::spin::SpinBasis>,
}

impl<'a> SpectralPropagator<'a> {
    pub fn new(eig: &'a EigenSystem, psi0: &StateVector) -> Result<Self> {
        Ok(SpectralPropagator {
            eig,
            coefficients: overlap_coefficients(eig, psi0)?,
            basis: psi0.basis().clone(),
        })
    }

    pub fn coefficients(&self) -> &Array1<Complex64> {
        &self.coefficients
    }

    /// `sum_n C_n e^{-i E_n t} |phi_n>`.
    pub fn state_at(&self, t: f64) -> Result<StateVector> {
        let phased: Array1<Complex64> = self
            .coefficients
            .iter()
            .zip(self.eig.energies.iter())
            .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t))
            .collect();
        StateVector::from_amplitudes(self.basis.clone(), self.eig.vectors.dot(&phased).to_vec())
    }
}

pub fn evolve_spectral(eig: &EigenSystem, psi0: &StateVector, t: f64) -> Result<StateVector> {
    SpectralPropagator::new(eig, psi0)?.state_at(t)
}
