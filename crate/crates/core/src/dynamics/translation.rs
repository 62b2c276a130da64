//! Momentum blocks of the cyclic translation `T`, used to diagonalize
//! translation-invariant density matrices block by block.

use std::f64::consts::TAU;
use std::ops::Range;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::Result;
use crate::linalg;

/// Largest entry of `T rho T^dag - rho` treated as rounding noise.
pub const INVARIANCE_TOL: f64 = 1e-12;

/// Shifts every site by one: bit `l` moves to bit `l + 1 mod N`.
pub(crate) fn translate(s: usize, n_sites: usize) -> usize {
    let mask = (1usize << n_sites) - 1;
    ((s << 1) | (s >> (n_sites - 1))) & mask
}

/// One momentum state: orbit members and their coefficients.
struct MomentumState {
    members: Vec<usize>,
    coeffs: Vec<Complex64>,
}

/// Orthonormal momentum basis grouped by crystal momentum.
pub(crate) struct MomentumBlocks {
    blocks: Vec<Vec<MomentumState>>,
}

impl MomentumBlocks {
    pub(crate) fn new(n_sites: usize) -> Self {
        let d = 1usize << n_sites;
        let mut seen = vec![false; d];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for s in 0..d {
            if seen[s] {
                continue;
            }
            let mut orbit = vec![s];
            seen[s] = true;
            let mut t = translate(s, n_sites);
            while t != s {
                seen[t] = true;
                orbit.push(t);
                t = translate(t, n_sites);
            }
            orbits.push(orbit);
        }
        let blocks = (0..n_sites)
            .map(|q| {
                orbits
                    .iter()
                    .filter(|o| (q * o.len()) % n_sites == 0)
                    .map(|o| {
                        let norm = 1.0 / (o.len() as f64).sqrt();
                        let coeffs = (0..o.len())
                            .map(|m| Complex64::from_polar(norm, -TAU * (q * m) as f64 / n_sites as f64))
                            .collect();
                        MomentumState {
                            members: o.clone(),
                            coeffs,
                        }
                    })
                    .collect()
            })
            .collect();
        MomentumBlocks { blocks }
    }

    /// Eigen-decomposition of a translation-invariant `rho`, block by block.
    /// Eigenvectors are returned in the product basis; the ranges index the
    /// columns belonging to each momentum.
    #[allow(clippy::type_complexity)]
    pub(crate) fn eigh(&self, rho: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>, Vec<Range<usize>>)> {
        let d = rho.nrows();
        let mut values = Array1::zeros(d);
        let mut vectors = Array2::zeros((d, d));
        let mut ranges = Vec::with_capacity(self.blocks.len());
        let mut offset = 0;
        for states in &self.blocks {
            let dk = states.len();
            if dk == 0 {
                continue;
            }
            // C = rho B, then rho_k = B^dag C.
            let mut c = Array2::<Complex64>::zeros((d, dk));
            for (b, st) in states.iter().enumerate() {
                for (&s, &w) in st.members.iter().zip(&st.coeffs) {
                    for i in 0..d {
                        c[[i, b]] += rho[[i, s]] * w;
                    }
                }
            }
            let mut block = Array2::<Complex64>::zeros((dk, dk));
            for (a, st) in states.iter().enumerate() {
                for (&s, &w) in st.members.iter().zip(&st.coeffs) {
                    let wc = w.conj();
                    for b in 0..dk {
                        block[[a, b]] += wc * c[[s, b]];
                    }
                }
            }
            let (w, v) = linalg::eigh_complex(&block)?;
            for e in 0..dk {
                values[offset + e] = w[e];
                for (a, st) in states.iter().enumerate() {
                    let x = v[[a, e]];
                    for (&s, &coef) in st.members.iter().zip(&st.coeffs) {
                        vectors[[s, offset + e]] += x * coef;
                    }
                }
            }
            ranges.push(offset..offset + dk);
            offset += dk;
        }
        Ok((values, vectors, ranges))
    }
}

/// `max |rho[T i, T j] - rho[i, j]|`.
pub(crate) fn translation_asymmetry(rho: &Array2<Complex64>, n_sites: usize) -> f64 {
    let d = rho.nrows();
    let shifted: Vec<usize> = (0..d).map(|s| translate(s, n_sites)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let ti = shifted[i];
        for j in 0..d {
            worst = worst.max((rho[[ti, shifted[j]]] - rho[[i, j]]).norm());
        }
    }
    worst
}
