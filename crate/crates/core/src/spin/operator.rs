use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::SpinBasis;
use super::pauli::PauliSum;
use super::state::StateVector;
use crate::error::{invalid, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Rows per parallel work item when assembling or applying operators.
const ROW_BLOCK: usize = 4096;

/// Sparse matrix in compressed-row layout acting on a [`SpinBasis`].
///
/// Column indices within a row are sorted and unique.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    basis: Arc<SpinBasis>,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<Complex64>,
    hermitian: bool,
}

fn merge_row(entries: &mut Vec<(u32, Complex64)>, indices: &mut Vec<u32>, values: &mut Vec<Complex64>) -> usize {
    entries.sort_unstable_by_key(|e| e.0);
    let mut count = 0;
    let mut k = 0;
    while k < entries.len() {
        let col = entries[k].0;
        let mut acc = ZERO;
        while k < entries.len() && entries[k].0 == col {
            acc += entries[k].1;
            k += 1;
        }
        if acc.norm_sqr() > 1e-30 {
            indices.push(col);
            values.push(acc);
            count += 1;
        }
    }
    entries.clear();
    count
}

impl SparseOperator {
    /// Assembles an operator row by row. `fill(row, entries)` pushes
    /// `(column, value)` pairs for one row; duplicates are summed and exact
    /// cancellations dropped.
    pub fn from_row_fn<F>(basis: Arc<SpinBasis>, hermitian: bool, fill: F) -> Self
    where
        F: Fn(usize, &mut Vec<(u32, Complex64)>) + Sync,
    {
        let dim = basis.dim();
        let blocks: Vec<(Vec<usize>, Vec<u32>, Vec<Complex64>)> = (0..dim.div_ceil(ROW_BLOCK))
            .into_par_iter()
            .map(|b| {
                let lo = b * ROW_BLOCK;
                let hi = (lo + ROW_BLOCK).min(dim);
                let mut lens = Vec::with_capacity(hi - lo);
                let mut idx = Vec::new();
                let mut val = Vec::new();
                let mut scratch = Vec::new();
                for row in lo..hi {
                    fill(row, &mut scratch);
                    lens.push(merge_row(&mut scratch, &mut idx, &mut val));
                }
                (lens, idx, val)
            })
            .collect();
        let nnz: usize = blocks.iter().map(|b| b.1.len()).sum();
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        indptr.push(0);
        for (lens, idx, val) in blocks {
            for l in lens {
                let last = *indptr.last().unwrap();
                indptr.push(last + l);
            }
            indices.extend_from_slice(&idx);
            values.extend_from_slice(&val);
        }
        let op = SparseOperator {
            basis,
            indptr,
            indices,
            values,
            hermitian,
        };
        debug_assert!(
            !hermitian || op.hermiticity_error() < 1e-12,
            "operator flagged Hermitian is not"
        );
        op
    }

    /// Builds the matrix of a Pauli sum in `basis`. Parity sectors accept
    /// only parity-even sums.
    ///
    /// In a sector with flip eigenvalue `p` the element between
    /// representatives `r` and `q` is `O[r, q] + p * O[r, ~q]`.
    pub fn from_pauli_sum(basis: Arc<SpinBasis>, sum: &PauliSum, hermitian: bool) -> Result<Self> {
        sum.check_sites(basis.n_sites())?;
        if !basis.is_full() {
            sum.check_parity("operator does not commute with the global spin flip")?;
        }
        let b = basis.clone();
        Ok(Self::from_row_fn(basis, hermitian, move |row, out| {
            let r = b.label(row);
            for (c, string) in sum.terms() {
                // <r|O|u> = conj(<u|O^dag|r>)
                let (u, a) = string.apply_adjoint(r);
                let (col, sign) = b.locate(u);
                out.push((col as u32, *c * a.conj() * sign));
            }
        }))
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(basis: Arc<SpinBasis>, diag: &[f64]) -> Result<Self> {
        if diag.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: diag.len(),
            });
        }
        let dim = diag.len();
        Ok(SparseOperator {
            basis,
            indptr: (0..=dim).collect(),
            indices: (0..dim as u32).collect(),
            values: diag.iter().map(|&d| Complex64::new(d, 0.0)).collect(),
            hermitian: true,
        })
    }

    pub fn identity(basis: Arc<SpinBasis>) -> Self {
        let d = vec![1.0; basis.dim()];
        Self::diagonal(basis, &d).expect("dimension matches")
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        basis: Arc<SpinBasis>,
        triplets: &[(usize, usize, Complex64)],
        hermitian: bool,
    ) -> Result<Self> {
        let dim = basis.dim();
        let mut rows: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); dim];
        for &(r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(invalid(format!("entry ({r}, {c}) outside a {dim}-dimensional space")));
            }
            rows[r].push((c as u32, v));
        }
        let op = Self::from_row_fn(basis, false, |row, out| out.extend_from_slice(&rows[row]));
        if hermitian && op.hermiticity_error() > 1e-12 {
            return Err(invalid("triplets flagged Hermitian do not form a Hermitian matrix"));
        }
        Ok(SparseOperator { hermitian, ..op })
    }

    pub fn basis(&self) -> &Arc<SpinBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// True when every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn row(&self, i: usize) -> (&[u32], &[Complex64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn max_row_nnz(&self) -> usize {
        self.indptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Element lookup by binary search within the row.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => ZERO,
        }
    }

    /// `y = A x` on raw amplitude slices.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        y.par_chunks_mut(ROW_BLOCK).enumerate().for_each(|(b, chunk)| {
            let base = b * ROW_BLOCK;
            for (k, out) in chunk.iter_mut().enumerate() {
                let i = base + k;
                let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
                let mut acc = ZERO;
                for p in lo..hi {
                    acc += self.values[p] * x[self.indices[p] as usize];
                }
                *out = acc;
            }
        });
    }

    /// `<x| A |x>` without allocating.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.dim());
        (0..self.dim())
            .into_par_iter()
            .with_min_len(ROW_BLOCK)
            .map(|i| {
                let (cols, vals) = self.row(i);
                let mut acc = ZERO;
                for (c, v) in cols.iter().zip(vals) {
                    acc += v * x[*c as usize];
                }
                x[i].conj() * acc
            })
            .sum()
    }

    pub fn adjoint(&self) -> SparseOperator {
        let dim = self.dim();
        let mut counts = vec![0usize; dim + 1];
        for &c in &self.indices {
            counts[c as usize + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0u32; self.nnz()];
        let mut values = vec![ZERO; self.nnz()];
        for i in 0..dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let slot = next[*c as usize];
                indices[slot] = i as u32;
                values[slot] = v.conj();
                next[*c as usize] += 1;
            }
        }
        SparseOperator {
            basis: self.basis.clone(),
            indptr,
            indices,
            values,
            hermitian: self.hermitian,
        }
    }

    /// Largest elementwise deviation `max |A - A^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        (0..self.dim())
            .into_par_iter()
            .with_min_len(ROW_BLOCK)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .map(|(&j, v)| (v - self.get(j as usize, i).conj()).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_same_space(other.dim())?;
        Ok(Self::from_row_fn(self.basis.clone(), false, |i, out| {
            let (cols, vals) = self.row(i);
            for (k, a) in cols.iter().zip(vals) {
                let (c2, v2) = other.row(*k as usize);
                for (j, b) in c2.iter().zip(v2) {
                    out.push((*j, a * b));
                }
            }
        }))
    }

    /// `self + scale * other`. The Hermitian flag survives only when both
    /// operands are Hermitian and the scale is real.
    pub fn add_scaled(&self, other: &SparseOperator, scale: Complex64) -> Result<SparseOperator> {
        self.check_same_space(other.dim())?;
        let hermitian = self.hermitian && other.hermitian && scale.im == 0.0;
        Ok(Self::from_row_fn(self.basis.clone(), hermitian, |i, out| {
            let (c1, v1) = self.row(i);
            out.extend(c1.iter().copied().zip(v1.iter().copied()));
            let (c2, v2) = other.row(i);
            out.extend(c2.iter().copied().zip(v2.iter().map(|v| v * scale)));
        }))
    }

    pub fn scaled(&self, scale: Complex64) -> SparseOperator {
        SparseOperator {
            basis: self.basis.clone(),
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * scale).collect(),
            hermitian: self.hermitian && scale.im == 0.0,
        }
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut m = Array2::zeros((self.dim(), self.dim()));
        for i in 0..self.dim() {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                m[[i, *c as usize]] = *v;
            }
        }
        m
    }

    /// Maximum absolute row sum; an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.row(i).1.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_same_space(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

/// Returns `op * v` (no normalization).
pub fn apply(op: &SparseOperator, v: &StateVector) -> Result<StateVector> {
    if op.basis().as_ref() != v.basis().as_ref() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.dim(),
        });
    }
    let mut out = vec![ZERO; op.dim()];
    op.matvec_into(v.amplitudes(), &mut out);
    StateVector::from_amplitudes(op.basis().clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_basis, Axis, PauliString, Sector};

    fn full(n: usize) -> Arc<SpinBasis> {
        Arc::new(build_basis(n, Sector::Full).unwrap())
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let b = full(3);
        let v = StateVector::from_amplitudes(
            b.clone(),
            (0..8).map(|k| Complex64::new(k as f64, -(k as f64))).collect(),
        )
        .unwrap();
        let w = apply(&SparseOperator::identity(b), &v).unwrap();
        assert_eq!(v.amplitudes(), w.amplitudes());
    }

    #[test]
    fn duplicates_merge_and_cancel() {
        let b = full(1);
        let mut sum = PauliSum::new();
        sum.push(0.5, PauliString::single(0, Axis::X));
        sum.push(0.5, PauliString::single(0, Axis::X));
        sum.push(1.0, PauliString::single(0, Axis::Z));
        sum.push(-1.0, PauliString::single(0, Axis::Z));
        let op = SparseOperator::from_pauli_sum(b, &sum, true).unwrap();
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn adjoint_and_product() {
        let b = full(2);
        let mut s = PauliSum::new();
        s.push(Complex64::new(0.5, 0.0), PauliString::single(0, Axis::X));
        s.push(Complex64::new(0.0, -0.5), PauliString::single(0, Axis::Y));
        let lower = SparseOperator::from_pauli_sum(b.clone(), &s, false).unwrap();
        let raise = lower.adjoint();
        let n = raise.matmul(&lower).unwrap();
        // sigma^+ sigma^- projects onto spin up at site 0
        for label in 0..4 {
            let expect = if label & 1 == 0 { 1.0 } else { 0.0 };
            assert!((n.get(label, label).re - expect).abs() < 1e-15);
        }
        assert_eq!(n.nnz(), 2);
        let d = lower.to_dense();
        let dd = raise.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d[[i, j]], dd[[j, i]].conj());
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let op = SparseOperator::identity(full(2));
        let v = StateVector::basis_state(full(3), 0).unwrap();
        assert!(matches!(apply(&op, &v), Err(Error::DimensionMismatch { .. })));
    }
}
