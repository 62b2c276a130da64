use num_complex::Complex64;
use rayon::prelude::*;

use super::propagate::{check_grid, PropagatorConfig};
use crate::error::{invalid, numerical, Result};
use crate::linalg;
use crate::spin::{SparseOperator, StateVector};

const PAR_MIN: usize = 1 << 14;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.par_iter()
        .with_min_len(PAR_MIN)
        .zip(b.par_iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    y.par_iter_mut()
        .with_min_len(PAR_MIN)
        .zip(x.par_iter())
        .for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(a: &[Complex64]) -> f64 {
    a.par_iter()
        .with_min_len(PAR_MIN)
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-decomposition of the Lanczos tridiagonal, reused for several step
/// sizes.
struct Tridiagonal {
    lambda: Vec<f64>,
    z: Vec<f64>,
    m: usize,
}

impl Tridiagonal {
    fn new(alphas: &[f64], betas: &[f64]) -> Result<Self> {
        let m = alphas.len();
        let (lambda, z) = linalg::eigh_tridiagonal(alphas, &betas[..m - 1])?;
        Ok(Tridiagonal { lambda, z, m })
    }

    /// `exp(-i tau T) e_1`.
    fn exp_e1(&self, tau: f64) -> Vec<Complex64> {
        let m = self.m;
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..m {
            let zk = &self.z[k * m..(k + 1) * m];
            let c = Complex64::from_polar(1.0, -tau * self.lambda[k]) * zk[0];
            for i in 0..m {
                y[i] += c * zk[i];
            }
        }
        y
    }
}

/// Lanczos approximation of `exp(-i H tau) psi` with adaptive sub-stepping.
///
/// Each sub-step grows the Krylov space until the a-posteriori estimate
/// `||psi|| * beta_m * |[exp(-i tau T_m) e_1]_m|` drops below the tolerance;
/// when `krylov_dim` is reached first the sub-step is shortened instead.
/// The basis is fully reorthogonalized. The state is never renormalized: a
/// norm change above 1e-10 in one step is reported as an error.
pub struct KrylovPropagator<'a> {
    h: &'a SparseOperator,
    krylov_dim: usize,
    tol: f64,
    vecs: Vec<Vec<Complex64>>,
    w: Vec<Complex64>,
    last_substep: Option<f64>,
    matvecs: usize,
    scale: f64,
}

impl<'a> KrylovPropagator<'a> {
    pub fn new(h: &'a SparseOperator, krylov_dim: usize, tol: f64) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(invalid("Krylov propagation requires a Hermitian generator"));
        }
        if krylov_dim < 2 {
            return Err(invalid("krylov_dim must be at least 2"));
        }
        if !(tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        Ok(KrylovPropagator {
            h,
            krylov_dim,
            tol,
            vecs: Vec::new(),
            w: vec![Complex64::new(0.0, 0.0); h.dim()],
            last_substep: None,
            matvecs: 0,
            scale: h.norm_inf().max(1.0),
        })
    }

    pub fn from_config(h: &'a SparseOperator, cfg: &PropagatorConfig) -> Result<Self> {
        Self::new(h, cfg.krylov_dim, cfg.tol)
    }

    /// Number of operator applications so far.
    pub fn matvecs(&self) -> usize {
        self.matvecs
    }

    fn vec_slot(&mut self, j: usize) {
        while self.vecs.len() <= j {
            self.vecs.push(vec![Complex64::new(0.0, 0.0); self.h.dim()]);
        }
    }

    /// Advances `psi` by `tau` in place.
    pub fn step(&mut self, psi: &mut [Complex64], tau: f64) -> Result<()> {
        if psi.len() != self.h.dim() {
            return Err(crate::Error::DimensionMismatch {
                expected: self.h.dim(),
                found: psi.len(),
            });
        }
        if tau < 0.0 || !tau.is_finite() {
            return Err(invalid("time step must be finite and non-negative"));
        }
        let mut remaining = tau;
        while remaining > 0.0 {
            let attempt = match self.last_substep {
                Some(s) => remaining.min(2.0 * s),
                None => remaining,
            };
            let done = self.substep(psi, attempt)?;
            self.last_substep = Some(done);
            if done >= remaining {
                break;
            }
            remaining -= done;
        }
        Ok(())
    }

    /// One Krylov sub-step of at most `tau`; returns the time advanced.
    fn substep(&mut self, psi: &mut [Complex64], tau: f64) -> Result<f64> {
        let beta0 = norm(psi);
        if !beta0.is_finite() {
            return Err(numerical("non-finite state entering Krylov step"));
        }
        if beta0 == 0.0 {
            return Ok(tau);
        }
        let scale = self.scale;
        self.vec_slot(0);
        {
            let v0 = &mut self.vecs[0];
            v0.par_iter_mut()
                .with_min_len(PAR_MIN)
                .zip(psi.par_iter())
                .for_each(|(v, p)| *v = p / beta0);
        }
        let mut alphas: Vec<f64> = Vec::with_capacity(self.krylov_dim);
        let mut betas: Vec<f64> = Vec::with_capacity(self.krylov_dim);
        let mut chosen: Option<(Vec<Complex64>, f64)> = None;

        for j in 0..self.krylov_dim {
            self.h.matvec_into(&self.vecs[j], &mut self.w);
            self.matvecs += 1;
            let mut w = std::mem::take(&mut self.w);
            if j > 0 {
                axpy((-betas[j - 1]).into(), &self.vecs[j - 1], &mut w);
            }
            let alpha = dot(&self.vecs[j], &w).re;
            axpy((-alpha).into(), &self.vecs[j], &mut w);
            for i in 0..=j {
                let c = dot(&self.vecs[i], &w);
                axpy(-c, &self.vecs[i], &mut w);
            }
            let beta = norm(&w);
            if !(alpha.is_finite() && beta.is_finite()) {
                self.w = w;
                return Err(numerical("NaN encountered in Lanczos recursion"));
            }
            alphas.push(alpha);
            betas.push(beta);
            let tri = Tridiagonal::new(&alphas, &betas)?;
            let m = j + 1;
            let y = tri.exp_e1(tau);
            let breakdown = beta <= 1e-13 * scale;
            let estimate = beta0 * beta * y[m - 1].norm();
            if breakdown || estimate <= self.tol {
                chosen = Some((y, tau));
            } else if m == self.krylov_dim {
                let mut t = tau;
                loop {
                    t *= 0.5;
                    if t < 1e-12 * tau.max(1e-300) || t < f64::MIN_POSITIVE {
                        self.w = w;
                        return Err(numerical(format!(
                            "Krylov tolerance {} unreachable with dimension {}",
                            self.tol, self.krylov_dim
                        )));
                    }
                    let y = tri.exp_e1(t);
                    if beta0 * beta * y[m - 1].norm() <= self.tol {
                        chosen = Some((y, t));
                        break;
                    }
                }
            }
            if chosen.is_some() {
                self.w = w;
                break;
            }
            self.vec_slot(j + 1);
            let next = &mut self.vecs[j + 1];
            next.par_iter_mut()
                .with_min_len(PAR_MIN)
                .zip(w.par_iter())
                .for_each(|(v, x)| *v = x / beta);
            self.w = w;
        }

        let (y, advanced) = chosen.expect("loop always selects a step");
        psi.par_iter_mut().with_min_len(PAR_MIN).for_each(|p| *p = Complex64::new(0.0, 0.0));
        for (i, yi) in y.iter().enumerate() {
            axpy(yi * beta0, &self.vecs[i], psi);
        }
        let after = norm(psi);
        if !after.is_finite() {
            return Err(numerical("non-finite state after Krylov step"));
        }
        if (after - beta0).abs() > 1e-10 {
            return Err(numerical(format!(
                "norm drift {:.3e} in one Krylov step",
                after - beta0
            )));
        }
        Ok(advanced)
    }
}

/// Propagates `psi` along `t_grid` (starting at 0) and hands each state to
/// `observer` as it is produced.
pub fn evolve_krylov_with<F>(
    h: &SparseOperator,
    psi: &StateVector,
    t_grid: &[f64],
    cfg: &PropagatorConfig,
    mut observer: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &StateVector) -> Result<()>,
{
    cfg.validate()?;
    check_grid(t_grid)?;
    if psi.basis().as_ref() != h.basis().as_ref() {
        return Err(crate::Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    let mut prop = KrylovPropagator::from_config(h, cfg)?;
    let mut state = psi.clone();
    observer(0, t_grid[0], &state)?;
    for k in 1..t_grid.len() {
        prop.step(state.amplitudes_mut(), t_grid[k] - t_grid[k - 1])?;
        observer(k, t_grid[k], &state)?;
    }
    Ok(())
}

/// All states `|psi(t_k)>` on the grid.
pub fn evolve_krylov(
    h: &SparseOperator,
    psi: &StateVector,
    t_grid: &[f64],
    cfg: &PropagatorConfig,
) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(t_grid.len());
    evolve_krylov_with(h, psi, t_grid, cfg, |_, _, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}
