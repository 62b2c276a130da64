use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spin::{Axis, PauliString, PauliSum, SparseOperator, SpinBasis};

/// Couplings of the periodic chain
/// `H = -J sum_l sz_l sz_{l+1} - Jp sum_l sz_l sz_{l+2} + h sum_l sx_l`.
///
/// Every sum runs over `l = 0..N` with indices taken mod `N`, so short
/// chains count wrapped bonds more than once (for `N = 2` the single
/// nearest-neighbour bond appears twice).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_sites: usize,
    pub j: f64,
    pub jp: f64,
    pub h: f64,
}

impl ModelParams {
    pub fn new(n_sites: usize, j: f64, jp: f64, h: f64) -> Result<Self> {
        let p = ModelParams { n_sites, j, jp, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.jp.is_finite() && self.h.is_finite()) {
            return Err(invalid("couplings must be finite"));
        }
        if self.jp != 0.0 && self.n_sites < 3 {
            return Err(invalid("next-nearest-neighbour coupling needs at least 3 sites"));
        }
        if self.n_sites < 2 {
            return Err(invalid("the chain needs at least 2 sites"));
        }
        Ok(())
    }

    pub fn pauli_sum(&self) -> PauliSum {
        let n = self.n_sites;
        let mut sum = PauliSum::new();
        for l in 0..n {
            sum.push(-self.j, PauliString::pair((l, Axis::Z), ((l + 1) % n, Axis::Z)));
        }
        if self.jp != 0.0 {
            for l in 0..n {
                sum.push(-self.jp, PauliString::pair((l, Axis::Z), ((l + 2) % n, Axis::Z)));
            }
        }
        for l in 0..n {
            sum.push(self.h, PauliString::single(l, Axis::X));
        }
        sum
    }
}

pub fn build_hamiltonian(params: &ModelParams, basis: &Arc<SpinBasis>) -> Result<SparseOperator> {
    params.validate()?;
    if basis.n_sites() != params.n_sites {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites,
            found: basis.n_sites(),
        });
    }
    SparseOperator::from_pauli_sum(basis.clone(), &params.pauli_sum(), true)
}

/// Dephasing `(gamma_z, sz_l)` and decay `(gamma_m, s-_l)` channels for every
/// site, with `s- = (sx - i sy) / 2` taking up to down. Zero-rate channels
/// are omitted. Full basis only.
pub fn jump_operators(
    basis: &Arc<SpinBasis>,
    gamma_z: f64,
    gamma_m: f64,
) -> Result<Vec<(f64, SparseOperator)>> {
    if !basis.is_full() {
        return Err(invalid("jump operators break the flip symmetry; use the full basis"));
    }
    if !(gamma_z >= 0.0 && gamma_m >= 0.0 && gamma_z.is_finite() && gamma_m.is_finite()) {
        return Err(invalid("rates must be finite and non-negative"));
    }
    let mut jumps = Vec::new();
    if gamma_z > 0.0 {
        for l in 0..basis.n_sites() {
            let mut s = PauliSum::new();
            s.push(1.0, PauliString::single(l, Axis::Z));
            jumps.push((gamma_z, SparseOperator::from_pauli_sum(basis.clone(), &s, true)?));
        }
    }
    if gamma_m > 0.0 {
        for l in 0..basis.n_sites() {
            let mut s = PauliSum::new();
            s.push(0.5, PauliString::single(l, Axis::X));
            s.push(Complex64::new(0.0, -0.5), PauliString::single(l, Axis::Y));
            jumps.push((gamma_m, SparseOperator::from_pauli_sum(basis.clone(), &s, false)?));
        }
    }
    Ok(jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{apply, build_basis, Parity, Sector, StateVector};

    fn full(n: usize) -> Arc<SpinBasis> {
        Arc::new(build_basis(n, Sector::Full).unwrap())
    }

    #[test]
    fn two_site_bond_counted_twice() {
        let p = ModelParams::new(2, 1.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p, &full(2)).unwrap();
        let up = StateVector::basis_state(full(2), 0).unwrap();
        let hv = apply(&h, &up).unwrap();
        assert_eq!(hv.amplitudes()[0], Complex64::new(-2.0, 0.0));
        assert_eq!(h.get(0b01, 0b01).re, 2.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams::new(2, 1.0, 0.5, 1.0).is_err());
        assert!(ModelParams::new(3, 1.0, 0.5, 1.0).is_ok());
        assert!(ModelParams::new(4, f64::NAN, 0.0, 1.0).is_err());
        let p = ModelParams::new(4, 1.0, 0.0, 1.0).unwrap();
        assert!(build_hamiltonian(&p, &full(5)).is_err());
    }

    #[test]
    fn sector_rows_are_sparse() {
        let p = ModelParams::new(10, 1.0, 1.0, 2.0).unwrap();
        let b = Arc::new(build_basis(10, Sector::Parity(Parity::Plus)).unwrap());
        let h = build_hamiltonian(&p, &b).unwrap();
        assert!(h.max_row_nnz() <= 10 + 2 + 1);
    }

    #[test]
    fn jumps() {
        let j = jump_operators(&full(1), 0.05, 0.0).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].0, 0.05);
        assert_eq!(j[0].1.get(1, 1).re, -1.0);

        let j = jump_operators(&full(2), 0.0, 0.05).unwrap();
        assert_eq!(j.len(), 2);
        let down = StateVector::basis_state(full(2), 0b01).unwrap();
        let out = apply(&j[0].1, &down).unwrap();
        assert!(out.norm() == 0.0, "lowering annihilates a down spin");
        let up = StateVector::basis_state(full(2), 0b00).unwrap();
        let out = apply(&j[1].1, &up).unwrap();
        assert_eq!(out.amplitudes()[0b10], Complex64::new(1.0, 0.0));

        assert_eq!(jump_operators(&full(10), 0.05, 0.05).unwrap().len(), 20);
        let sec = Arc::new(build_basis(2, Sector::Parity(Parity::Plus)).unwrap());
        assert!(jump_operators(&sec, 0.1, 0.1).is_err());
    }
}
