use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spin::{SparseOperator, SpinBasis};

/// Largest dimension handed to the dense eigensolver by default.
pub const DEFAULT_DENSE_CAP: usize = 1 << 14;

/// Full spectrum of a Hermitian operator: ascending energies and the
/// eigenvectors as matrix columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub energies: Array1<f64>,
    pub vectors: Array2<Complex64>,
    pub basis: Arc<SpinBasis>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `max_n || H phi_n - E_n phi_n ||`.
    pub fn max_residual(&self, h: &SparseOperator) -> f64 {
        let d = self.dim();
        let mut hv = vec![Complex64::new(0.0, 0.0); d];
        (0..d)
            .map(|n| {
                let col: Vec<Complex64> = self.vectors.column(n).to_vec();
                h.matvec_into(&col, &mut hv);
                hv.iter()
                    .zip(&col)
                    .map(|(a, b)| (a - b * self.energies[n]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^dag V - 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.t().mapv(|z| z.conj()).dot(&self.vectors);
        g.indexed_iter()
            .map(|((i, j), z)| (z - if i == j { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max)
    }
}

pub fn dense_eigensystem(h: &SparseOperator) -> Result<EigenSystem> {
    dense_eigensystem_with_cap(h, DEFAULT_DENSE_CAP)
}

/// Dense Hermitian eigensolve; real symmetric input takes the real path.
pub fn dense_eigensystem_with_cap(h: &SparseOperator, cap: usize) -> Result<EigenSystem> {
    let d = h.dim();
    if d > cap {
        return Err(Error::CapExceeded {
            what: "dense eigensolver dimension",
            value: d,
            cap,
        });
    }
    if !h.is_hermitian() {
        return Err(Error::InvalidArgument(
            "dense eigensystem requires an operator flagged Hermitian".into(),
        ));
    }
    let (energies, vectors) = if h.is_real() {
        let mut m = Array2::<f64>::zeros((d, d));
        for i in 0..d {
            let (cols, vals) = h.row(i);
            for (c, v) in cols.iter().zip(vals) {
                m[[i, *c as usize]] = v.re;
            }
        }
        let (w, v) = linalg::eigh_real(&m)?;
        (w, v.mapv(|x| Complex64::new(x, 0.0)))
    } else {
        linalg::eigh_complex(&h.to_dense())?
    };
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numerical("eigensolver returned non-finite energies".into()));
    }
    Ok(EigenSystem {
        energies,
        vectors: vectors.as_standard_layout().to_owned(),
        basis: h.basis().clone(),
    })
}
