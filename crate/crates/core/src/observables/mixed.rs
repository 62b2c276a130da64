use std::ops::Range;

use ndarray::{s, Array2, ShapeBuilder, Zip};
use num_complex::Complex64;

use super::qfi::{maximize_form, OptimalQfi, QfiSample};
use crate::dynamics::{DensityMatrix, RhoSpectrum};
use crate::error::Result;
use crate::spin::{apply_collective_full, Axis, BlochDirection};

/// Pairs with `p_k + p_l` at or below this floor are skipped.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Most negative eigenvalue accepted as rounding noise.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// `<k| S_n |l>` for the eigenvectors in columns `cols`.
fn generator_in_block(spec: &RhoSpectrum, cols: &Range<usize>, n_sites: usize, dir: &BlochDirection) -> Array2<Complex64> {
    let v = spec.vectors.slice(s![.., cols.clone()]);
    let d = v.nrows();
    let mut w = Array2::<Complex64>::zeros((d, cols.len()).f());
    for (mut out, col) in w.columns_mut().into_iter().zip(v.columns()) {
        let col: Vec<Complex64> = col.to_vec();
        let img = apply_collective_full(n_sites, dir, &col);
        out.assign(&ndarray::ArrayView1::from(&img[..]));
    }
    v.t().mapv(|z| z.conj()).dot(&w)
}

/// `2 (p_k - p_l)^2 / (p_k + p_l)` within one block; slightly negative
/// eigenvalues count as zero.
fn pair_weights(spec: &RhoSpectrum, cols: &Range<usize>) -> Array2<f64> {
    let p: Vec<f64> = spec.values.slice(s![cols.clone()]).iter().map(|x| x.max(0.0)).collect();
    let d = p.len();
    Array2::from_shape_fn((d, d), |(k, l)| {
        let s = p[k] + p[l];
        if s <= WEIGHT_FLOOR {
            0.0
        } else {
            2.0 * (p[k] - p[l]).powi(2) / s
        }
    })
}

/// Mixed-state Fisher information from a precomputed spectrum of rho.
pub fn qfi_mixed_with_spectrum(spec: &RhoSpectrum, n_sites: usize, dir: &BlochDirection) -> Result<QfiSample> {
    spec.check_positive(POSITIVITY_TOL)?;
    let mut f = 0.0;
    for cols in &spec.blocks {
        let a = generator_in_block(spec, cols, n_sites, dir);
        let w = pair_weights(spec, cols);
        Zip::from(&w).and(&a).for_each(|w, a| f += w * a.norm_sqr());
    }
    Ok(QfiSample::new(f, n_sites, *dir))
}

/// `F_Q = 2 sum_kl (p_k - p_l)^2 / (p_k + p_l) |<k|S_n|l>|^2`.
pub fn qfi_mixed(rho: &DensityMatrix, dir: &BlochDirection) -> Result<QfiSample> {
    let spec = rho.spectrum()?;
    qfi_mixed_with_spectrum(&spec, rho.n_sites(), dir)
}

/// Optimal direction for a mixed state through the 3 x 3 form
/// `M_ab = sum_kl w_kl Re[<k|S_a|l> <l|S_b|k>]`.
pub fn qfi_mixed_optimal(spec: &RhoSpectrum, n_sites: usize) -> Result<OptimalQfi> {
    spec.check_positive(POSITIVITY_TOL)?;
    let mut form = [[0.0; 3]; 3];
    for cols in &spec.blocks {
        let w = pair_weights(spec, cols);
        let mats: Vec<Array2<Complex64>> = Axis::ALL
            .iter()
            .map(|&ax| generator_in_block(spec, cols, n_sites, &BlochDirection::axis(ax)))
            .collect();
        for a in 0..3 {
            for b in a..3 {
                let mut m = 0.0;
                Zip::from(&w)
                    .and(&mats[a])
                    .and(&mats[b])
                    .for_each(|w, x, y| m += w * (x * y.conj()).re);
                form[a][b] += m;
            }
        }
    }
    (form[1][0], form[2][0], form[2][1]) = (form[0][1], form[0][2], form[1][2]);
    maximize_form(&form, n_sites)
}
