use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg;
use crate::spin::{apply_collective_full, sz_squared_diagonal, Axis, BlochDirection, StateVector};

/// Tolerance on the input norm.
pub const NORM_TOL: f64 = 1e-8;

/// Fisher information of a collective spin generator at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiSample {
    pub t: f64,
    pub direction: BlochDirection,
    /// `F_Q`.
    pub fisher: f64,
    /// `F_Q / N`.
    pub density: f64,
}

impl QfiSample {
    pub fn new(fisher: f64, n_sites: usize, direction: BlochDirection) -> Self {
        QfiSample {
            t: 0.0,
            direction,
            fisher,
            density: fisher / n_sites as f64,
        }
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Phase uncertainty `1 / sqrt(F_Q)` from the Cramér-Rao bound.
    pub fn delta_phi(&self) -> f64 {
        1.0 / self.fisher.sqrt()
    }
}

/// Optimal direction and the Fisher information along it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalQfi {
    pub sample: QfiSample,
    /// The top eigenvalue of the covariance form is (near) degenerate, so
    /// the returned direction is one maximizer among many.
    pub degenerate: bool,
}

const DEGENERACY_TOL: f64 = 1e-9;

fn magnetization_squared(psi: &StateVector) -> f64 {
    let diag = sz_squared_diagonal(psi.basis());
    psi.amplitudes()
        .par_iter()
        .with_min_len(4096)
        .zip(diag.par_iter())
        .map(|(a, m2)| a.norm_sqr() * m2)
        .sum()
}

fn magnetization(psi: &StateVector) -> f64 {
    let n = psi.n_sites() as f64;
    psi.amplitudes()
        .par_iter()
        .with_min_len(4096)
        .enumerate()
        .map(|(s, a)| a.norm_sqr() * 0.5 * (n - 2.0 * s.count_ones() as f64))
        .sum()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.par_iter()
        .with_min_len(4096)
        .zip(b.par_iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// `F_Q = 4 Var(S_n)` for a pure state.
///
/// Along `z` the diagonal of `S_z^2` suffices (in a flip sector `<S_z>`
/// vanishes identically); other directions act matrix-free on the
/// full-basis amplitudes.
pub fn qfi_pure(psi: &StateVector, dir: &BlochDirection) -> Result<QfiSample> {
    psi.check_normalized(NORM_TOL)?;
    let n = psi.n_sites();
    let fisher = if dir.aligned_axis() == Some(Axis::Z) {
        let mean = if psi.basis().is_full() { magnetization(psi) } else { 0.0 };
        4.0 * (magnetization_squared(psi) - mean * mean)
    } else {
        let full = psi.to_full_amplitudes();
        let v = apply_collective_full(n, dir, &full);
        let second = dot(&v, &v).re;
        let first = dot(&full, &v).re;
        4.0 * (second - first * first)
    };
    Ok(QfiSample::new(fisher.max(0.0), n, *dir))
}

/// `Gamma_ab = Re <S_a psi|S_b psi> - <S_a><S_b>` over `a, b` in `x, y, z`.
pub fn covariance_matrix(psi: &StateVector) -> Result<[[f64; 3]; 3]> {
    psi.check_normalized(NORM_TOL)?;
    let n = psi.n_sites();
    let full = psi.to_full_amplitudes();
    let images: Vec<Vec<Complex64>> = Axis::ALL
        .iter()
        .map(|&a| apply_collective_full(n, &BlochDirection::axis(a), &full))
        .collect();
    let means: Vec<f64> = images.iter().map(|v| dot(&full, v).re).collect();
    let mut gamma = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let g = dot(&images[a], &images[b]).re - means[a] * means[b];
            gamma[a][b] = g;
            gamma[b][a] = g;
        }
    }
    Ok(gamma)
}

/// Unit vector with the sign convention `n_z >= 0`, ties broken by `n_y`,
/// then `n_x`.
pub(crate) fn canonical_sign(v: [f64; 3]) -> [f64; 3] {
    let key = [v[2], v[1], v[0]];
    let flip = key
        .iter()
        .find(|c| c.abs() > 1e-12)
        .is_some_and(|c| *c < 0.0);
    if flip {
        [-v[0], -v[1], -v[2]]
    } else {
        v
    }
}

/// Top eigenpair of a 3 x 3 Fisher form with `F(n) = n^T M n`.
pub(crate) fn maximize_form(form: &[[f64; 3]; 3], n_sites: usize) -> Result<OptimalQfi> {
    let (w, vecs) = linalg::eigh_sym3(form)?;
    let top = w[2];
    let degenerate = (top - w[1]).abs() <= DEGENERACY_TOL * top.abs().max(1.0);
    let v = canonical_sign(vecs[2]);
    let dir = BlochDirection::normalized(v[0], v[1], v[2])?;
    Ok(OptimalQfi {
        sample: QfiSample::new(top.max(0.0), n_sites, dir),
        degenerate,
    })
}

/// Maximum of `F_Q[S_n]` over directions: `4 lambda_max(Gamma)`.
pub fn qfi_optimal(psi: &StateVector) -> Result<OptimalQfi> {
    let gamma = covariance_matrix(psi)?;
    let form = gamma.map(|row| row.map(|g| 4.0 * g));
    maximize_form(&form, psi.n_sites())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::initial_state;
    use crate::spin::{build_basis, Parity, Sector};

    fn full(n: usize) -> Arc<crate::spin::SpinBasis> {
        Arc::new(build_basis(n, Sector::Full).unwrap())
    }

    #[test]
    fn polarized_state_values() {
        for n in [1usize, 4, 7] {
            let psi = initial_state(&full(n)).unwrap();
            let z = qfi_pure(&psi, &BlochDirection::z()).unwrap();
            assert!((z.density - 1.0).abs() < 1e-12);
            let x = qfi_pure(&psi, &BlochDirection::x()).unwrap();
            assert!(x.fisher.abs() < 1e-12);
            let g = covariance_matrix(&psi).unwrap();
            let q = n as f64 / 4.0;
            let want = [[0.0, 0.0, 0.0], [0.0, q, 0.0], [0.0, 0.0, q]];
            for a in 0..3 {
                for b in 0..3 {
                    assert!((g[a][b] - want[a][b]).abs() < 1e-12);
                }
            }
            if n > 1 {
                let opt = qfi_optimal(&psi).unwrap();
                assert!(opt.degenerate);
                assert!((opt.sample.fisher - n as f64).abs() < 1e-10);
                assert!(opt.sample.direction.components()[0].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sector_matches_full() {
        let sec = Arc::new(build_basis(6, Sector::Parity(Parity::Plus)).unwrap());
        let psi = initial_state(&sec).unwrap();
        let psi_full = initial_state(&full(6)).unwrap();
        for dir in [
            BlochDirection::z(),
            BlochDirection::y(),
            BlochDirection::normalized(0.2, 0.5, -0.7).unwrap(),
        ] {
            let a = qfi_pure(&psi, &dir).unwrap().fisher;
            let b = qfi_pure(&psi_full, &dir).unwrap().fisher;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_values() {
        let psi = StateVector::ghz(full(6)).unwrap();
        let z = qfi_pure(&psi, &BlochDirection::z()).unwrap();
        assert!((z.fisher - 36.0).abs() < 1e-12);
        assert!((z.density - 6.0).abs() < 1e-12);
        let opt = qfi_optimal(&psi).unwrap();
        assert!(!opt.degenerate);
        assert!((opt.sample.direction.components()[2] - 1.0).abs() < 1e-12);
        assert!((opt.sample.fisher - 36.0).abs() < 1e-10);
        let g = covariance_matrix(&psi).unwrap();
        assert!((g[2][2] - 9.0).abs() < 1e-12);
        assert!((z.delta_phi() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_rejected() {
        let psi = initial_state(&full(3)).unwrap().scaled(Complex64::new(1.1, 0.0));
        assert!(qfi_pure(&psi, &BlochDirection::z()).is_err());
    }

    #[test]
    fn sign_convention() {
        assert_eq!(canonical_sign([0.1, 0.2, -0.3]), [-0.1, -0.2, 0.3]);
        assert_eq!(canonical_sign([0.5, -0.5, 0.0]), [-0.5, 0.5, 0.0]);
        assert_eq!(canonical_sign([-1.0, 0.0, 0.0]), [1.0, 0.0, 0.0]);
    }
}
