//! Dense matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::DEFAULT_DENSE_CAP;
use crate::spin::{SparseOperator, StateVector};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Array2<Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn matrix_exp(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix_exp needs a square matrix");
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / Complex64::new(2f64.powi(squarings), 0.0);
    let ident = Array2::<Complex64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a.dot(&(a6.dot(&inner_u) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1)));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&inner_v) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);
    let mut r = linalg::solve_complex(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}

/// `exp(-i H t) psi` via a dense exponential.
pub fn expm_propagate(h: &SparseOperator, psi: &StateVector, t: f64) -> Result<StateVector> {
    if h.dim() > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "dense exponential dimension",
            value: h.dim(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    if h.basis().as_ref() != psi.basis().as_ref() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    let gen = h.to_dense() * Complex64::new(0.0, -t);
    let u = matrix_exp(&gen)?;
    let v = ndarray::Array1::from(psi.amplitudes().to_vec());
    StateVector::from_amplitudes(psi.basis().clone(), u.dot(&v).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_pauli_rotation() {
        // exp(-i theta sigma^x) = cos(theta) - i sin(theta) sigma^x
        let theta = 7.3;
        let a = ndarray::arr2(&[
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -theta)],
            [Complex64::new(0.0, -theta), Complex64::new(0.0, 0.0)],
        ]);
        let e = matrix_exp(&a).unwrap();
        assert!((e[[0, 0]] - Complex64::new(theta.cos(), 0.0)).norm() < 1e-13);
        assert!((e[[0, 1]] - Complex64::new(0.0, -theta.sin())).norm() < 1e-13);
    }

    #[test]
    fn exp_of_diagonal() {
        let a = ndarray::arr2(&[
            [Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-20.0, 0.0)],
        ]);
        let e = matrix_exp(&a).unwrap();
        assert!((e[[0, 0]].re - 1.5f64.exp()).abs() < 1e-12 * 1.5f64.exp());
        assert!((e[[1, 1]].re - (-20f64).exp()).abs() < 1e-20);
    }
}
