use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EigenSystem, DEFAULT_DENSE_CAP};
use crate::spin::sz_squared_diagonal;

/// Split of `f_Q[S_z](t)` into its time-independent diagonal part and the
/// oscillating off-diagonal part in the eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QfiDecomposition {
    pub f_diag: f64,
    pub times: Vec<f64>,
    pub f_offdiag: Vec<f64>,
}

impl QfiDecomposition {
    /// `f_diag + f_offdiag(t_k)`.
    pub fn total(&self, k: usize) -> f64 {
        self.f_diag + self.f_offdiag[k]
    }
}

/// `S_z^2` in the eigenbasis: `V^dag diag(m^2) V`.
pub fn sz_squared_in_eigenbasis(eig: &EigenSystem) -> Array2<Complex64> {
    let diag = sz_squared_diagonal(&eig.basis);
    let mut scaled = eig.vectors.clone();
    for (mut row, m2) in scaled.rows_mut().into_iter().zip(&diag) {
        row.mapv_inplace(|z| z * *m2);
    }
    eig.vectors.t().mapv(|z| z.conj()).dot(&scaled)
}

/// With `x_n = C_n e^{-i E_n t}` and `B = S_z^2` in the eigenbasis,
/// `f_diag = (4/N) sum_n |C_n|^2 B_nn` and
/// `f_offdiag(t) = (4/N) sum_{m != n} conj(x_m) B_mn x_n`.
/// The magnetization term is dropped since `<S_z>` vanishes for states of
/// definite flip parity.
pub fn qfi_decomposition(eig: &EigenSystem, coefficients: &Array1<Complex64>, t_grid: &[f64]) -> Result<QfiDecomposition> {
    let d = eig.dim();
    if d > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "decomposition dimension",
            value: d,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    if coefficients.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: coefficients.len(),
        });
    }
    let scale = 4.0 / eig.basis.n_sites() as f64;
    let b = sz_squared_in_eigenbasis(eig);
    let diag_sum: f64 = coefficients
        .iter()
        .zip(b.diag())
        .map(|(c, bnn)| c.norm_sqr() * bnn.re)
        .sum();
    let f_offdiag = t_grid
        .iter()
        .map(|&t| {
            let x: Array1<Complex64> = coefficients
                .iter()
                .zip(eig.energies.iter())
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t))
                .collect();
            let bx = b.dot(&x);
            let full: Complex64 = x.iter().zip(bx.iter()).map(|(a, y)| a.conj() * y).sum();
            scale * (full.re - diag_sum)
        })
        .collect();
    Ok(QfiDecomposition {
        f_diag: scale * diag_sum,
        times: t_grid.to_vec(),
        f_offdiag,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::{initial_sector, initial_state, overlap_coefficients, SpectralPropagator};
    use crate::model::{build_hamiltonian, dense_eigensystem, ModelParams};
    use crate::observables::qfi_pure;
    use crate::spin::{build_basis, BlochDirection};

    #[test]
    fn sums_to_direct_qfi() {
        let n = 6;
        let b = Arc::new(build_basis(n, initial_sector(n)).unwrap());
        let h = build_hamiltonian(&ModelParams::new(n, 1.0, 0.0, 1.0).unwrap(), &b).unwrap();
        let eig = dense_eigensystem(&h).unwrap();
        let psi0 = initial_state(&b).unwrap();
        let c = overlap_coefficients(&eig, &psi0).unwrap();
        let grid: Vec<f64> = (0..20).map(|k| 0.37 * k as f64).collect();
        let dec = qfi_decomposition(&eig, &c, &grid).unwrap();
        let prop = SpectralPropagator::new(&eig, &psi0).unwrap();
        for (k, &t) in grid.iter().enumerate() {
            let psi = prop.state_at(t).unwrap();
            let f = qfi_pure(&psi, &BlochDirection::z()).unwrap().density;
            assert!((dec.total(k) - f).abs() < 1e-10, "t = {t}");
        }
        assert!((dec.total(0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigenstate_has_no_offdiagonal_part() {
        let n = 4;
        let b = Arc::new(build_basis(n, initial_sector(n)).unwrap());
        let h = build_hamiltonian(&ModelParams::new(n, 1.0, 0.0, 0.6).unwrap(), &b).unwrap();
        let eig = dense_eigensystem(&h).unwrap();
        let mut c = Array1::zeros(eig.dim());
        c[2] = Complex64::new(1.0, 0.0);
        let dec = qfi_decomposition(&eig, &c, &[0.0, 1.0, 2.5]).unwrap();
        assert!(dec.f_offdiag.iter().all(|f| f.abs() < 1e-12));
    }
}
