use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::TimeSeries;
use crate::dynamics::{initial_sector, initial_state, propagate_with, time_grid, PropagatorConfig};
use crate::error::{invalid, Result};
use crate::model::{build_hamiltonian, ModelParams};
use crate::observables::{
    husimi, qfi_optimal, qfi_pure, rate_function, HusimiGrid, OptimalQfi, POLAR_CAP_ANGLE,
};
use crate::spin::{build_basis, BlochDirection, Sector, SpinBasis};

/// Basis used for closed-system runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorChoice {
    /// The flip sector that contains the initial state.
    Auto,
    Full,
}

impl SectorChoice {
    pub fn resolve(self, n_sites: usize) -> Sector {
        match self {
            SectorChoice::Auto => initial_sector(n_sites),
            SectorChoice::Full => Sector::Full,
        }
    }
}

impl std::str::FromStr for SectorChoice {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SectorChoice::Auto),
            "full" => Ok(SectorChoice::Full),
            other => Err(invalid(format!("unknown sector choice '{other}' (auto|full)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchOptions {
    pub t_max: f64,
    pub propagator: PropagatorConfig,
    pub sector: SectorChoice,
    /// Evaluate the optimal direction on every `k`-th grid point; 0 disables it.
    pub optimal_stride: usize,
    /// Times (snapped to the grid) at which Husimi snapshots are taken.
    pub husimi_times: Vec<f64>,
    pub husimi_nodes: (usize, usize),
}

impl Default for QuenchOptions {
    fn default() -> Self {
        QuenchOptions {
            t_max: 8.0,
            propagator: PropagatorConfig::default(),
            sector: SectorChoice::Auto,
            optimal_stride: 1,
            husimi_times: Vec::new(),
            husimi_nodes: (
                crate::observables::DEFAULT_HUSIMI_NODES,
                crate::observables::DEFAULT_HUSIMI_NODES,
            ),
        }
    }
}

/// One row of a quench trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuenchRow {
    pub t: f64,
    pub f_q_z: f64,
    pub optimal: Option<OptimalQfi>,
    pub rate: f64,
    pub loschmidt: f64,
    pub energy: f64,
    pub norm: f64,
    /// `1 / sqrt(F_Q[S_z])`.
    pub delta_phi: f64,
}

#[derive(Clone, Debug)]
pub struct HusimiSnapshot {
    pub t: f64,
    pub grid: HusimiGrid,
    pub integral: f64,
    pub polar_cap_mass: f64,
}

#[derive(Clone, Debug)]
pub struct QuenchTrajectory {
    pub params: ModelParams,
    pub sector: Sector,
    pub rows: Vec<QuenchRow>,
    pub snapshots: Vec<HusimiSnapshot>,
}

impl QuenchTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn qfi_z_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.times(), self.rows.iter().map(|r| r.f_q_z).collect(), "f_Q_z")
    }

    pub fn rate_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.times(), self.rows.iter().map(|r| r.rate).collect(), "lambda")
    }

    /// Optimal QFI density where it was evaluated.
    pub fn qfi_optimal_series(&self) -> Result<TimeSeries> {
        let (t, f): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter_map(|r| r.optimal.map(|o| (r.t, o.sample.density)))
            .unzip();
        TimeSeries::new(t, f, "f_Q_opt")
    }
}

/// Indices of the grid points closest to each requested time.
pub(crate) fn snap_to_grid(times: &[f64], dt: f64, t_max: f64) -> Result<Vec<usize>> {
    times
        .iter()
        .map(|&t| {
            if !(0.0..=t_max + 1e-12).contains(&t) {
                return Err(invalid(format!("snapshot time {t} outside [0, {t_max}]")));
            }
            Ok((t / dt).round() as usize)
        })
        .collect()
}

/// Sudden quench from the x-polarized product state under the given model.
pub fn run_quench(params: &ModelParams, opts: &QuenchOptions) -> Result<QuenchTrajectory> {
    params.validate()?;
    opts.propagator.validate()?;
    let n = params.n_sites;
    let sector = opts.sector.resolve(n);
    let basis: Arc<SpinBasis> = Arc::new(build_basis(n, sector)?);
    let h = build_hamiltonian(params, &basis)?;
    let psi0 = initial_state(&basis)?;
    let grid = time_grid(opts.t_max, opts.propagator.dt)?;
    let snaps = snap_to_grid(&opts.husimi_times, opts.propagator.dt, opts.t_max)?;
    let (n_theta, n_phi) = opts.husimi_nodes;
    let mut rows = Vec::with_capacity(grid.len());
    let mut snapshots = Vec::new();
    let z = BlochDirection::z();
    propagate_with(&h, &psi0, &grid, &opts.propagator, |k, t, psi| {
        let qz = qfi_pure(psi, &z)?;
        let optimal = if opts.optimal_stride > 0 && k % opts.optimal_stride == 0 {
            Some(qfi_optimal(psi)?)
        } else {
            None
        };
        let rate = rate_function(&psi0, psi, n)?;
        rows.push(QuenchRow {
            t,
            f_q_z: qz.density,
            optimal: optimal.map(|mut o| {
                o.sample.t = t;
                o
            }),
            rate: rate.rate,
            loschmidt: rate.echo,
            energy: h.quadratic_form(psi.amplitudes()).re,
            norm: psi.norm(),
            delta_phi: qz.delta_phi(),
        });
        for _ in snaps.iter().filter(|&&s| s == k) {
            let grid = husimi(psi, n_theta, n_phi)?;
            snapshots.push(HusimiSnapshot {
                t,
                integral: grid.integral(),
                polar_cap_mass: grid.polar_cap_mass(POLAR_CAP_ANGLE),
                grid,
            });
        }
        Ok(())
    })?;
    Ok(QuenchTrajectory {
        params: *params,
        sector,
        rows,
        snapshots,
    })
}
