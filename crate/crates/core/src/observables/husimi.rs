use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::spin::{Sector, StateVector};

/// Default resolution in each angle.
pub const DEFAULT_HUSIMI_NODES: usize = 181;

/// Default limit on `n_theta * n_phi`.
pub const DEFAULT_HUSIMI_CAP: usize = 1 << 22;

/// Polar angle bounding the caps used for GHZ-likeness.
pub const POLAR_CAP_ANGLE: f64 = PI / 6.0;

/// `Q(theta, phi)` on a tensor grid, `theta` from the +z pole.
#[derive(Clone, Debug)]
pub struct HusimiGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Array2<f64>,
    /// Integration weights in `theta` that include the `sin(theta)` measure.
    theta_weights: Vec<f64>,
}

/// Clenshaw-Curtis weights for `u = cos(theta)` on `theta_j = j pi / n`.
/// Exact for polynomials in `cos(theta)` up to degree `n`.
fn clenshaw_curtis(n_nodes: usize) -> Vec<f64> {
    let n = n_nodes - 1;
    (0..=n)
        .map(|j| {
            let theta = PI * j as f64 / n as f64;
            let mut s = 1.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                s -= b * (2.0 * k as f64 * theta).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            c * s / n as f64
        })
        .collect()
}

impl HusimiGrid {
    fn masked_integral(&self, keep: impl Fn(f64) -> bool) -> f64 {
        let dphi = 2.0 * PI / self.phi.len() as f64;
        self.theta
            .iter()
            .zip(&self.theta_weights)
            .zip(self.values.rows())
            .filter(|((t, _), _)| keep(**t))
            .map(|((_, w), row)| w * row.sum() * dphi)
            .sum()
    }

    /// Quadrature over the sphere; equals the weight of the state in the
    /// symmetric subspace.
    pub fn integral(&self) -> f64 {
        self.masked_integral(|_| true)
    }

    /// Fraction of the integral within `cap` of either pole.
    pub fn polar_cap_mass(&self, cap: f64) -> f64 {
        let edge = 1e-12;
        let inside = self.masked_integral(|t| t < cap - edge || t > PI - cap + edge);
        inside / self.integral()
    }

    /// `(theta, phi, Q)` at the largest grid value.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for ((i, j), &q) in self.values.indexed_iter() {
            if q > best.2 {
                best = (self.theta[i], self.phi[j], q);
            }
        }
        best
    }
}

/// Sums of amplitudes over labels with `k` down spins, `k = 0..=N`.
pub fn down_count_amplitudes(psi: &StateVector) -> Vec<Complex64> {
    let n = psi.n_sites();
    let mut sums = vec![Complex64::new(0.0, 0.0); n + 1];
    let basis = psi.basis();
    match basis.sector() {
        Sector::Full => {
            for (s, a) in psi.amplitudes().iter().enumerate() {
                sums[s.count_ones() as usize] += a;
            }
        }
        Sector::Parity(p) => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for (s, a) in psi.amplitudes().iter().enumerate() {
                let k = basis.label(s).count_ones() as usize;
                sums[k] += a * r;
                sums[n - k] += a * (r * p.sign());
            }
        }
    }
    sums
}

/// Husimi distribution `(N+1)/(4 pi) |<theta, phi|psi>|^2` with coherent
/// states `(x)_l (cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>)`.
///
/// The overlap factorizes over the number of down spins, so each grid point
/// costs `O(N)` after one pass over the amplitudes.
pub fn husimi(psi: &StateVector, n_theta: usize, n_phi: usize) -> Result<HusimiGrid> {
    husimi_with_cap(psi, n_theta, n_phi, DEFAULT_HUSIMI_CAP)
}

pub fn husimi_with_cap(psi: &StateVector, n_theta: usize, n_phi: usize, cap: usize) -> Result<HusimiGrid> {
    if n_theta < 2 || n_phi < 2 {
        return Err(invalid("Husimi grid needs at least 2 nodes per angle"));
    }
    let points = n_theta.saturating_mul(n_phi);
    if points > cap {
        return Err(Error::CapExceeded {
            what: "Husimi grid points",
            value: points,
            cap,
        });
    }
    let n = psi.n_sites();
    let sums = down_count_amplitudes(psi);
    let theta: Vec<f64> = (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect();
    let phi: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
    let norm = (n as f64 + 1.0) / (4.0 * PI);
    let rows: Vec<Vec<f64>> = theta
        .par_iter()
        .map(|&t| {
            let (c, s) = ((0.5 * t).cos(), (0.5 * t).sin());
            let radial: Vec<Complex64> = (0..=n)
                .map(|k| sums[k] * (c.powi((n - k) as i32) * s.powi(k as i32)))
                .collect();
            phi.iter()
                .map(|&f| {
                    let step = Complex64::from_polar(1.0, -f);
                    // Horner in e^{-i phi}.
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in radial.iter().rev() {
                        acc = acc * step + r;
                    }
                    norm * acc.norm_sqr()
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_vec((n_theta, n_phi), rows.into_iter().flatten().collect())
        .expect("grid shape");
    Ok(HusimiGrid {
        theta,
        phi,
        values,
        theta_weights: clenshaw_curtis(n_theta),
    })
}
