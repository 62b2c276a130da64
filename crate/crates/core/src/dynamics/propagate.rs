use serde::{Deserialize, Serialize};

use super::{evolve_krylov_with, expm_propagate, SpectralPropagator};
use crate::error::{invalid, Result};
use crate::model::dense_eigensystem;
use crate::spin::{SparseOperator, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Krylov,
    Spectral,
    DenseExpm,
}

/// Settings for closed-system propagation. Times are in units of 1/J.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub method: Method,
    pub dt: f64,
    pub krylov_dim: usize,
    pub tol: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            method: Method::Krylov,
            dt: 0.01,
            krylov_dim: 30,
            tol: 1e-10,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt must be positive"));
        }
        if self.krylov_dim < 2 {
            return Err(invalid("krylov_dim must be at least 2"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        Ok(())
    }
}

/// `0, dt, 2 dt, ...` up to `t_max` (inclusive within rounding). Points are
/// `k * dt`, never accumulated sums.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && t_max >= 0.0 && t_max.is_finite()) {
        return Err(invalid("time grid needs dt > 0 and finite t_max >= 0"));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => return Err(invalid("empty time grid")),
        Some(&t0) if t0 != 0.0 => return Err(invalid("time grid must start at 0")),
        _ => {}
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("time grid must be strictly increasing and finite"));
    }
    Ok(())
}

/// Closed-system propagation with the method selected in `cfg`; each grid
/// state is handed to `observer` in order.
pub fn propagate_with<F>(
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
    match cfg.method {
        Method::Krylov => evolve_krylov_with(h, psi, t_grid, cfg, observer),
        Method::Spectral => {
            let eig = dense_eigensystem(h)?;
            let prop = SpectralPropagator::new(&eig, psi)?;
            for (k, &t) in t_grid.iter().enumerate() {
                observer(k, t, &prop.state_at(t)?)?;
            }
            Ok(())
        }
        Method::DenseExpm => {
            for (k, &t) in t_grid.iter().enumerate() {
                observer(k, t, &expm_propagate(h, psi, t)?)?;
            }
            Ok(())
        }
    }
}

/// All grid states for the method selected in `cfg`.
pub fn propagate(
    h: &SparseOperator,
    psi: &StateVector,
    t_grid: &[f64],
    cfg: &PropagatorConfig,
) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(t_grid.len());
    propagate_with(h, psi, t_grid, cfg, |_, _, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}
