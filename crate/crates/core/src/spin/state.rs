use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{Sector, SpinBasis};
use crate::error::{invalid, numerical, Error, Result};

/// Pure state of the chain, stored as amplitudes over a [`SpinBasis`].
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<SpinBasis>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(basis: Arc<SpinBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(numerical("state has non-finite amplitudes"));
        }
        Ok(StateVector { basis, amps })
    }

    /// Basis vector number `index` of `basis`.
    pub fn basis_state(basis: Arc<SpinBasis>, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(invalid(format!(
                "basis index {index} outside a {}-dimensional space",
                basis.dim()
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { basis, amps })
    }

    /// Product state `(x)_l (a_l |up> + b_l |down>)` on the full basis.
    pub fn product(basis: Arc<SpinBasis>, sites: &[(Complex64, Complex64)]) -> Result<Self> {
        if !basis.is_full() {
            return Err(invalid("product states are built on the full basis"));
        }
        if sites.len() != basis.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_sites(),
                found: sites.len(),
            });
        }
        let amps = (0..basis.dim())
            .map(|s| {
                sites.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (l, &(up, down))| {
                    acc * if (s >> l) & 1 == 0 { up } else { down }
                })
            })
            .collect();
        StateVector::from_amplitudes(basis, amps)
    }

    /// `(|up...up> + |down...down>) / sqrt(2)`. Available on the full basis
    /// and in the even flip sector, where it is the first basis vector.
    pub fn ghz(basis: Arc<SpinBasis>) -> Result<Self> {
        match basis.sector() {
            Sector::Full => {
                let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
                let r = std::f64::consts::FRAC_1_SQRT_2;
                amps[0] = r.into();
                amps[basis.mask()] = r.into();
                Ok(StateVector { basis, amps })
            }
            Sector::Parity(p) if p.sign() > 0.0 => StateVector::basis_state(basis, 0),
            Sector::Parity(_) => Err(invalid("the GHZ state has flip eigenvalue +1")),
        }
    }

    pub fn basis(&self) -> &Arc<SpinBasis> {
        &self.basis
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .par_iter()
            .with_min_len(4096)
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .par_iter()
            .with_min_len(4096)
            .zip(other.amps.par_iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            basis: self.basis.clone(),
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    pub(crate) fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(invalid(format!("state norm {n} deviates from 1 by more than {tol}")));
        }
        Ok(())
    }

    /// Amplitudes on the full product basis. Sector states are expanded
    /// through `(|s> + p |~s>) / sqrt(2)`.
    pub fn to_full_amplitudes(&self) -> Vec<Complex64> {
        match self.basis.sector() {
            Sector::Full => self.amps.clone(),
            Sector::Parity(p) => {
                let half = self.amps.len();
                let r = std::f64::consts::FRAC_1_SQRT_2;
                let sign = p.sign() * r;
                let mut full = vec![Complex64::new(0.0, 0.0); 2 * half];
                let mask = self.basis.mask();
                // Representatives are labels below 2^(N-1); their partners are
                // the complements, which fill the upper half in reverse order.
                let (lower, upper) = full.split_at_mut(half);
                lower
                    .par_iter_mut()
                    .with_min_len(4096)
                    .zip(self.amps.par_iter())
                    .for_each(|(f, a)| *f = a * r);
                upper
                    .par_iter_mut()
                    .with_min_len(4096)
                    .enumerate()
                    .for_each(|(k, f)| *f = self.amps[(k + half) ^ mask] * sign);
                full
            }
        }
    }

    /// The same physical state expressed on the full basis.
    pub fn to_full(&self) -> Result<StateVector> {
        let basis = Arc::new(super::basis::build_basis_with_cap(
            self.n_sites(),
            Sector::Full,
            usize::BITS as usize - 2,
        )?);
        Ok(StateVector {
            basis,
            amps: self.to_full_amplitudes(),
        })
    }
}
