use std::ops::Range;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{invalid, numerical, Error, Result};
use super::translation::{translation_asymmetry, MomentumBlocks, INVARIANCE_TOL};
use crate::linalg;
use crate::spin::{SparseOperator, SpinBasis, StateVector};

/// Largest chain length accepted for dense density matrices.
pub const DEFAULT_DENSITY_CAP: usize = 12;

/// Dense density matrix on the full product basis.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    basis: Arc<SpinBasis>,
    matrix: Array2<Complex64>,
}

/// Eigenvalues and eigenvectors (columns) of a density matrix. Columns are
/// grouped into symmetry blocks; the generators of collective rotations
/// have no matrix elements between blocks. Values ascend within a block.
#[derive(Clone, Debug)]
pub struct RhoSpectrum {
    pub values: Array1<f64>,
    pub vectors: Array2<Complex64>,
    pub blocks: Vec<Range<usize>>,
}

impl RhoSpectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Fails when the smallest eigenvalue is below `-tol`.
    pub fn check_positive(&self, tol: f64) -> Result<()> {
        let m = self.min_eigenvalue();
        if m < -tol {
            return Err(numerical(format!(
                "density matrix lost positivity: smallest eigenvalue {m:.3e}"
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_density_cap(n_sites: usize, cap: usize) -> Result<()> {
    if n_sites > cap {
        return Err(Error::CapExceeded {
            what: "density-matrix chain length",
            value: n_sites,
            cap,
        });
    }
    Ok(())
}

fn require_full(basis: &SpinBasis) -> Result<()> {
    if !basis.is_full() {
        return Err(invalid("density matrices live on the full basis"));
    }
    Ok(())
}

impl DensityMatrix {
    pub fn from_matrix(basis: Arc<SpinBasis>, matrix: Array2<Complex64>) -> Result<Self> {
        require_full(&basis)?;
        check_density_cap(basis.n_sites(), DEFAULT_DENSITY_CAP)?;
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(numerical("density matrix has non-finite entries"));
        }
        Ok(DensityMatrix { basis, matrix })
    }

    /// `|psi><psi|`; sector states are expanded to the full basis first.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        check_density_cap(psi.n_sites(), DEFAULT_DENSITY_CAP)?;
        let full = psi.to_full()?;
        let a = full.amplitudes();
        let d = a.len();
        let matrix = Array2::from_shape_fn((d, d), |(i, j)| a[i] * a[j].conj());
        Ok(DensityMatrix {
            basis: full.basis().clone(),
            matrix,
        })
    }

    pub fn maximally_mixed(basis: Arc<SpinBasis>) -> Result<Self> {
        require_full(&basis)?;
        check_density_cap(basis.n_sites(), DEFAULT_DENSITY_CAP)?;
        let d = basis.dim();
        let matrix = Array2::eye(d) * Complex64::new(1.0 / d as f64, 0.0);
        Ok(DensityMatrix { basis, matrix })
    }

    pub fn basis(&self) -> &Arc<SpinBasis> {
        &self.basis
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().sum()
    }

    /// `max |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Uses momentum blocks when rho commutes with the cyclic translation.
    pub fn spectrum(&self) -> Result<RhoSpectrum> {
        let n = self.n_sites();
        if n >= 3 && translation_asymmetry(&self.matrix, n) <= INVARIANCE_TOL {
            let (values, vectors, blocks) = MomentumBlocks::new(n).eigh(&self.matrix)?;
            return Ok(RhoSpectrum { values, vectors, blocks });
        }
        self.dense_spectrum()
    }

    /// Spectrum from one dense eigen-decomposition.
    pub fn dense_spectrum(&self) -> Result<RhoSpectrum> {
        let (values, vectors) = linalg::eigh_complex(&self.matrix)?;
        let d = values.len();
        Ok(RhoSpectrum {
            values,
            vectors,
            blocks: std::iter::once(0..d).collect(),
        })
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let w = linalg::eigvalsh_complex(&self.matrix)?;
        Ok(w.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Trace norm `|| self - other ||_1`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        let w = linalg::eigvalsh_complex(&diff)?;
        Ok(w.iter().map(|x| x.abs()).sum())
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, op: &SparseOperator) -> Result<Complex64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..op.dim() {
            let (cols, vals) = op.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                acc += v * self.matrix[[j as usize, i]];
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_basis, collective_spin, BlochDirection, Parity, Sector};

    #[test]
    fn pure_state_properties() {
        let b = Arc::new(build_basis(3, Sector::Full).unwrap());
        let psi = crate::dynamics::initial_state(&b).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!((rho.trace() - 1.0).norm() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!(rho.hermiticity_error() < 1e-16);
        let sx = collective_spin(&b, &BlochDirection::x()).unwrap();
        assert!((rho.expectation(&sx).unwrap().re + 1.5).abs() < 1e-13);
        let spec = rho.spectrum().unwrap();
        assert_eq!(spec.blocks.len(), 3);
        assert!((spec.values.iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        assert!(spec.min_eigenvalue().abs() < 1e-12);
    }

    #[test]
    fn sector_state_is_expanded() {
        let sec = Arc::new(build_basis(4, Sector::Parity(Parity::Plus)).unwrap());
        let psi = crate::dynamics::initial_state(&sec).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert_eq!(rho.dim(), 16);
        let full = Arc::new(build_basis(4, Sector::Full).unwrap());
        let direct = DensityMatrix::from_pure(&crate::dynamics::initial_state(&full).unwrap()).unwrap();
        assert!(rho.trace_distance(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn mixed_and_caps() {
        let b = Arc::new(build_basis(2, Sector::Full).unwrap());
        let m = DensityMatrix::maximally_mixed(b).unwrap();
        assert!((m.purity() - 0.25).abs() < 1e-15);
        assert!((m.min_eigenvalue().unwrap() - 0.25).abs() < 1e-14);
        let big = Arc::new(build_basis(13, Sector::Full).unwrap());
        assert!(matches!(
            DensityMatrix::maximally_mixed(big),
            Err(Error::CapExceeded { .. })
        ));
    }
}
