use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::SpinBasis;
use super::direction::BlochDirection;
use super::operator::SparseOperator;
use super::pauli::{Axis, PauliString, PauliSum};
use crate::error::{invalid, Error, Result};

/// `sigma^axis` on one site.
pub fn pauli_site(basis: &Arc<SpinBasis>, site: usize, axis: Axis) -> Result<SparseOperator> {
    if site >= basis.n_sites() {
        return Err(invalid(format!(
            "site {site} out of range for a {}-site chain",
            basis.n_sites()
        )));
    }
    let mut sum = PauliSum::new();
    sum.push(1.0, PauliString::single(site, axis));
    SparseOperator::from_pauli_sum(basis.clone(), &sum, true)
}

fn collective_sum(n_sites: usize, dir: &BlochDirection) -> PauliSum {
    let mut sum = PauliSum::new();
    for l in 0..n_sites {
        for axis in Axis::ALL {
            let c = dir.component(axis);
            if c != 0.0 {
                sum.push(0.5 * c, PauliString::single(l, axis));
            }
        }
    }
    sum
}

/// `S_n = 1/2 sum_l (n_x sigma^x_l + n_y sigma^y_l + n_z sigma^z_l)`.
///
/// In a parity sector only `n = +-x` is representable.
pub fn collective_spin(basis: &Arc<SpinBasis>, dir: &BlochDirection) -> Result<SparseOperator> {
    if !basis.is_full() && (dir.component(Axis::Y) != 0.0 || dir.component(Axis::Z) != 0.0) {
        return Err(Error::ParityOdd(
            "collective spin with y or z components in a parity sector; use the full basis \
             or collective_spin_squared"
                .into(),
        ));
    }
    SparseOperator::from_pauli_sum(basis.clone(), &collective_sum(basis.n_sites(), dir), true)
}

/// Diagonal of `S_z^2` over the basis; valid in parity sectors as well since
/// a label and its complement share `(N - 2 popcount)^2`.
pub fn sz_squared_diagonal(basis: &SpinBasis) -> Vec<f64> {
    let n = basis.n_sites() as f64;
    basis
        .states()
        .map(|s| {
            let m = 0.5 * (n - 2.0 * s.count_ones() as f64);
            m * m
        })
        .collect()
}

/// `(S_n)^2`. Diagonal fast path for `n = +-z`; otherwise assembled from
/// two-site Pauli products. Parity sectors accept axis-aligned directions.
pub fn collective_spin_squared(
    basis: &Arc<SpinBasis>,
    dir: &BlochDirection,
) -> Result<SparseOperator> {
    let aligned = dir.aligned_axis();
    if aligned == Some(Axis::Z) {
        return SparseOperator::diagonal(basis.clone(), &sz_squared_diagonal(basis));
    }
    if !basis.is_full() && aligned.is_none() {
        return Err(Error::ParityOdd(
            "squared collective spin along a non-axis direction in a parity sector".into(),
        ));
    }
    let n = basis.n_sites();
    let mut sum = PauliSum::new();
    // Same-site products reduce to |n|^2 = 1 per site.
    sum.push(0.25 * n as f64, PauliString::new(Vec::new()));
    for l in 0..n {
        for m in 0..n {
            if l == m {
                continue;
            }
            for a in Axis::ALL {
                for b in Axis::ALL {
                    let c = dir.component(a) * dir.component(b);
                    if c != 0.0 {
                        sum.push(0.25 * c, PauliString::pair((l, a), (m, b)));
                    }
                }
            }
        }
    }
    SparseOperator::from_pauli_sum(basis.clone(), &sum, true)
}

/// Matrix-free `S_n |psi>` on full-basis amplitudes of an `n_sites` chain.
pub fn apply_collective_full(
    n_sites: usize,
    dir: &BlochDirection,
    psi: &[Complex64],
) -> Vec<Complex64> {
    assert_eq!(psi.len(), 1 << n_sites);
    let [nx, ny, nz] = dir.components();
    let half_n = 0.5 * n_sites as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    out.par_chunks_mut(4096).enumerate().for_each(|(b, chunk)| {
        let base = b * 4096;
        for (k, o) in chunk.iter_mut().enumerate() {
            let s = base + k;
            let mut acc = Complex64::new(0.0, 0.0);
            if nz != 0.0 {
                acc += psi[s] * (nz * (half_n - s.count_ones() as f64));
            }
            if nx != 0.0 || ny != 0.0 {
                for l in 0..n_sites {
                    let t = s ^ (1 << l);
                    // <s| sigma^x_l |t> = 1; <s| sigma^y_l |t> = i if site l of
                    // s is down (t up), -i otherwise.
                    let y_phase = if (s >> l) & 1 == 1 { ny } else { -ny };
                    acc += psi[t] * Complex64::new(0.5 * nx, 0.5 * y_phase);
                }
            }
            *o = acc;
        }
    });
    out
}
