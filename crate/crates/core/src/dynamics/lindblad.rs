//! Master-equation integration on a dense density matrix.
//!
//! The generator is applied as sparse-times-dense products and jump
//! sandwiches; the superoperator is never formed.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::density::{check_density_cap, DensityMatrix, RhoSpectrum, DEFAULT_DENSITY_CAP};
use super::propagate::check_grid;
use crate::error::{invalid, numerical, Error, Result};
use crate::spin::SparseOperator;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladConfig {
    /// Bound on the max-abs local error per step.
    pub tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Diagonalize at every grid point and abort on negative eigenvalues.
    pub check_positivity: bool,
    pub positivity_tol: f64,
    pub trace_tol: f64,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        LindbladConfig {
            tol: 1e-10,
            initial_step: 1e-3,
            min_step: 1e-12,
            check_positivity: true,
            positivity_tol: 1e-6,
            trace_tol: 1e-8,
        }
    }
}

impl LindbladConfig {
    pub fn with_tol(tol: f64) -> Self {
        LindbladConfig {
            tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.initial_step > 0.0 && self.min_step > 0.0) {
            return Err(invalid("integrator tolerances and steps must be positive"));
        }
        Ok(())
    }
}

/// Jump operator with at most one nonzero per row, stored as
/// `row i -> (column, value)`; `NONE` marks empty rows.
struct Monomial {
    rate: f64,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
    /// Non-empty rows as `(row, column, conj(value))`.
    entries: Vec<(u32, u32, Complex64)>,
    real: bool,
}

const NONE: u32 = u32::MAX;

impl Monomial {
    fn from_operator(rate: f64, op: &SparseOperator) -> Option<Self> {
        let d = op.dim();
        let mut cols = vec![NONE; d];
        let mut vals = vec![ZERO; d];
        let mut entries = Vec::new();
        for i in 0..d {
            let (c, v) = op.row(i);
            match c.len() {
                0 => {}
                1 => {
                    cols[i] = c[0];
                    vals[i] = v[0];
                    entries.push((i as u32, c[0], v[0].conj()));
                }
                _ => return None,
            }
        }
        let real = vals.iter().all(|v| v.im == 0.0);
        Some(Monomial {
            rate,
            cols,
            vals,
            entries,
            real,
        })
    }

    fn is_diagonal(&self) -> bool {
        self.cols.iter().enumerate().all(|(i, &c)| c == NONE || c as usize == i)
    }
}

/// `L(rho) = -i (H_eff rho - rho H_eff^dag) + sum_k g_k J_k rho J_k^dag` with
/// `H_eff = H - (i/2) sum_k g_k J_k^dag J_k`.
///
/// Diagonal jumps collapse into one elementwise weight matrix, jumps with
/// one entry per row become gathers, anything else takes the general
/// sparse sandwich.
pub struct LindbladGenerator {
    h_eff: SparseOperator,
    /// `W_ij = sum_k g_k l_k(i) conj(l_k(j))` over diagonal jumps.
    diagonal_weights: Option<Vec<Complex64>>,
    monomials: Vec<Monomial>,
    general: Vec<(f64, SparseOperator)>,
    dim: usize,
}

const TILE: usize = 32;

impl LindbladGenerator {
    pub fn new(h: &SparseOperator, jumps: &[(f64, SparseOperator)]) -> Result<Self> {
        if !h.basis().is_full() {
            return Err(invalid("open-system evolution needs the full basis"));
        }
        check_density_cap(h.basis().n_sites(), DEFAULT_DENSITY_CAP)?;
        if !h.is_hermitian() {
            return Err(invalid("Hamiltonian is not flagged Hermitian"));
        }
        let d = h.dim();
        let mut h_eff = h.clone();
        let mut diagonal: Vec<Monomial> = Vec::new();
        let mut monomials = Vec::new();
        let mut general = Vec::new();
        for (rate, op) in jumps {
            if !(rate.is_finite() && *rate >= 0.0) {
                return Err(invalid(format!("jump rate {rate} must be finite and non-negative")));
            }
            if op.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: op.dim(),
                });
            }
            if *rate == 0.0 {
                continue;
            }
            let decay = op.adjoint().matmul(op)?;
            h_eff = h_eff.add_scaled(&decay, Complex64::new(0.0, -0.5 * rate))?;
            match Monomial::from_operator(*rate, op) {
                Some(m) if m.is_diagonal() => diagonal.push(m),
                Some(m) => monomials.push(m),
                None => general.push((*rate, op.clone())),
            }
        }
        let diagonal_weights = (!diagonal.is_empty()).then(|| {
            let mut w = vec![ZERO; d * d];
            w.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
                for m in &diagonal {
                    if m.cols[i] == NONE {
                        continue;
                    }
                    let li = m.vals[i] * m.rate;
                    for (j, x) in row.iter_mut().enumerate() {
                        if m.cols[j] != NONE {
                            *x += li * m.vals[j].conj();
                        }
                    }
                }
            });
            w
        });
        Ok(LindbladGenerator {
            h_eff,
            diagonal_weights,
            monomials,
            general,
            dim: d,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = L(rho)` for row-major `rho`; `scratch` holds `H_eff rho`.
    fn apply_into(&self, rho: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let d = self.dim;
        let h = &self.h_eff;
        scratch.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
            row.fill(ZERO);
            let (cols, vals) = h.row(i);
            for (&k, v) in cols.iter().zip(vals) {
                let src = &rho[k as usize * d..(k as usize + 1) * d];
                if v.im == 0.0 {
                    let v = v.re;
                    for (x, s) in row.iter_mut().zip(src) {
                        *x += s * v;
                    }
                } else {
                    for (x, s) in row.iter_mut().zip(src) {
                        *x += v * s;
                    }
                }
            }
        });
        let x = &*scratch;
        let tile = TILE.min(d);
        out.par_chunks_mut(d * tile).enumerate().for_each(|(b, block)| {
            let i0 = b * tile;
            let rows = block.len() / d;
            // -i X + (-i X)^dag, read tile by tile so the transposed
            // accesses stay in cache.
            for j0 in (0..d).step_by(tile) {
                let j1 = (j0 + tile).min(d);
                for r in 0..rows {
                    let i = i0 + r;
                    for j in j0..j1 {
                        let a = x[i * d + j];
                        let c = x[j * d + i].conj();
                        block[r * d + j] = Complex64::new(a.im - c.im, c.re - a.re);
                    }
                }
            }
            for r in 0..rows {
                let i = i0 + r;
                let row = &mut block[r * d..(r + 1) * d];
                if let Some(w) = &self.diagonal_weights {
                    let src = &rho[i * d..(i + 1) * d];
                    for ((o, wij), s) in row.iter_mut().zip(&w[i * d..(i + 1) * d]).zip(src) {
                        *o += wij * s;
                    }
                }
                for m in &self.monomials {
                    let a = m.cols[i];
                    if a == NONE {
                        continue;
                    }
                    let li = m.vals[i] * m.rate;
                    let src = &rho[a as usize * d..(a as usize + 1) * d];
                    if m.real {
                        let li = li.re;
                        for &(j, c, w) in &m.entries {
                            row[j as usize] += src[c as usize] * (li * w.re);
                        }
                    } else {
                        for &(j, c, w) in &m.entries {
                            row[j as usize] += li * src[c as usize] * w;
                        }
                    }
                }
                for (rate, op) in &self.general {
                    let (ci, vi) = op.row(i);
                    if ci.is_empty() {
                        continue;
                    }
                    for (j, o) in row.iter_mut().enumerate() {
                        let (cj, vj) = op.row(j);
                        let mut acc = ZERO;
                        for (&a, la) in ci.iter().zip(vi) {
                            let src = &rho[a as usize * d..(a as usize + 1) * d];
                            for (&c, lc) in cj.iter().zip(vj) {
                                acc += la * src[c as usize] * lc.conj();
                            }
                        }
                        *o += acc * *rate;
                    }
                }
            }
        });
    }

    pub fn apply(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let d = self.dim;
        let flat: Vec<Complex64> = rho.iter().copied().collect();
        let mut out = vec![ZERO; d * d];
        let mut scratch = vec![ZERO; d * d];
        self.apply_into(&flat, &mut out, &mut scratch);
        Array2::from_shape_vec((d, d), out).expect("square buffer")
    }
}

// Dormand-Prince 5(4) tableau; the generator is time independent so the
// nodes are not needed.
const A: [&[f64]; 7] = [
    &[],
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combine(y: &[Complex64], step: f64, coeffs: &[f64], ks: &[Vec<Complex64>], out: &mut [Complex64]) {
    out.par_iter_mut()
        .with_min_len(4096)
        .enumerate()
        .for_each(|(n, o)| {
            let mut acc = ZERO;
            for (c, k) in coeffs.iter().zip(ks) {
                if *c != 0.0 {
                    acc += k[n] * *c;
                }
            }
            *o = y[n] + acc * step;
        });
}

fn error_norm(step: f64, ks: &[Vec<Complex64>]) -> f64 {
    (0..ks[0].len())
        .into_par_iter()
        .with_min_len(4096)
        .map(|n| {
            let mut acc = ZERO;
            for (e, k) in E.iter().zip(ks) {
                acc += k[n] * *e;
            }
            (acc * step).norm()
        })
        .reduce(|| 0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Integrates from `rho0` over `t_grid` (starting at 0). At each grid point
/// the trace is checked and, when enabled, the spectrum is computed, checked
/// for positivity and passed to `observer`.
pub fn lindblad_evolve_with<F>(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    cfg: &LindbladConfig,
    mut observer: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &DensityMatrix, Option<&RhoSpectrum>) -> Result<()>,
{
    cfg.validate()?;
    check_grid(t_grid)?;
    let d = gen.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho0.dim(),
        });
    }
    let mut y: Vec<Complex64> = rho0.matrix().iter().copied().collect();
    let mut ks: Vec<Vec<Complex64>> = (0..7).map(|_| vec![ZERO; d * d]).collect();
    let mut stage = vec![ZERO; d * d];
    let mut scratch = vec![ZERO; d * d];
    let mut snapshot = rho0.clone();

    let mut emit = |k: usize, t: f64, y: &[Complex64], snap: &mut DensityMatrix| -> Result<()> {
        snap.matrix_mut()
            .as_slice_mut()
            .expect("standard layout")
            .copy_from_slice(y);
        let tr = snap.trace();
        if (tr - 1.0).norm() > cfg.trace_tol {
            return Err(numerical(format!("trace drifted to {tr} at t = {t}")));
        }
        if cfg.check_positivity {
            let spec = snap.spectrum()?;
            spec.check_positive(cfg.positivity_tol)
                .map_err(|e| numerical(format!("{e} at t = {t}")))?;
            observer(k, t, snap, Some(&spec))
        } else {
            observer(k, t, snap, None)
        }
    };

    emit(0, t_grid[0], &y, &mut snapshot)?;
    gen.apply_into(&y, &mut ks[0], &mut scratch);
    let mut t = t_grid[0];
    let mut h = cfg.initial_step;
    for (idx, &target) in t_grid.iter().enumerate().skip(1) {
        while t < target {
            let remaining = target - t;
            let clipped = remaining <= h * (1.0 + 1e-12);
            let step = if clipped { remaining } else { h };
            for s in 1..7 {
                combine(&y, step, A[s], &ks[..s], &mut stage);
                gen.apply_into(&stage, &mut ks[s], &mut scratch);
            }
            // `stage` now holds the fifth-order solution and ks[6] its slope.
            let err = error_norm(step, &ks) / cfg.tol;
            if err.is_nan() {
                return Err(numerical(format!("non-finite density matrix near t = {t}")));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                std::mem::swap(&mut y, &mut stage);
                ks.swap(0, 6);
                t = if clipped { target } else { t + step };
                let proposal = step * factor;
                h = if clipped { proposal.max(h) } else { proposal };
            } else {
                h = step * factor;
                if h < cfg.min_step {
                    return Err(numerical(format!(
                        "step size underflow ({h:.3e}) at t = {t}"
                    )));
                }
            }
        }
        emit(idx, target, &y, &mut snapshot)?;
    }
    Ok(())
}

/// `rho(t_k)` for every grid time.
pub fn lindblad_evolve(
    h: &SparseOperator,
    jumps: &[(f64, SparseOperator)],
    rho0: &DensityMatrix,
    t_grid: &[f64],
    tol: f64,
) -> Result<Vec<DensityMatrix>> {
    let gen = LindbladGenerator::new(h, jumps)?;
    let mut out = Vec::with_capacity(t_grid.len());
    lindblad_evolve_with(&gen, rho0, t_grid, &LindbladConfig::with_tol(tol), |_, _, rho, _| {
        out.push(rho.clone());
        Ok(())
    })?;
    Ok(out)
}
