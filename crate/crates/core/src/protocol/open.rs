use std::sync::Arc;

use serde::Serialize;

use crate::analysis::TimeSeries;
use crate::dynamics::{
    initial_state, lindblad_evolve_with, time_grid, DensityMatrix, LindbladConfig, LindbladGenerator,
    DEFAULT_DENSITY_CAP,
};
use crate::error::{invalid, Error, Result};
use crate::model::{build_hamiltonian, jump_operators, ModelParams};
use crate::observables::{entanglement_depth, qfi_mixed_optimal, qfi_mixed_with_spectrum, DepthConvention};
use crate::spin::{build_basis, BlochDirection, Sector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpenOptions {
    pub t_max: f64,
    /// Spacing of the output grid; the integrator steps adaptively between.
    pub dt: f64,
    pub tol: f64,
    pub optimal: bool,
}

impl Default for OpenOptions {
    fn default() -> Self {
        OpenOptions {
            t_max: 8.0,
            dt: 0.05,
            tol: 1e-10,
            optimal: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OpenRow {
    pub t: f64,
    pub f_q_z: f64,
    pub f_q_opt: Option<f64>,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
    pub depth_producibility: usize,
    pub depth_linear: usize,
}

#[derive(Clone, Debug)]
pub struct OpenTrajectory {
    pub params: ModelParams,
    pub gamma_z: f64,
    pub gamma_m: f64,
    pub rows: Vec<OpenRow>,
}

impl OpenTrajectory {
    pub fn qfi_z_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(
            self.rows.iter().map(|r| r.t).collect(),
            self.rows.iter().map(|r| r.f_q_z).collect(),
            "f_Q_z",
        )
    }

    /// Largest `f_Q[S_z]` along the trajectory and its time.
    pub fn max_qfi(&self) -> (f64, f64) {
        self.rows
            .iter()
            .fold((0.0, f64::NEG_INFINITY), |best, r| if r.f_q_z > best.1 { (r.t, r.f_q_z) } else { best })
    }
}

/// Master-equation run from the polarized state with dephasing and decay.
pub fn run_open(params: &ModelParams, gamma_z: f64, gamma_m: f64, opts: &OpenOptions) -> Result<OpenTrajectory> {
    params.validate()?;
    let n = params.n_sites;
    if n > DEFAULT_DENSITY_CAP {
        return Err(Error::CapExceeded {
            what: "density-matrix chain length",
            value: n,
            cap: DEFAULT_DENSITY_CAP,
        });
    }
    let basis = Arc::new(build_basis(n, Sector::Full)?);
    let h = build_hamiltonian(params, &basis)?;
    let jumps = jump_operators(&basis, gamma_z, gamma_m)?;
    let gen = LindbladGenerator::new(&h, &jumps)?;
    let rho0 = DensityMatrix::from_pure(&initial_state(&basis)?)?;
    let grid = time_grid(opts.t_max, opts.dt)?;
    let cfg = LindbladConfig::with_tol(opts.tol);
    let z = BlochDirection::z();
    let mut rows = Vec::with_capacity(grid.len());
    lindblad_evolve_with(&gen, &rho0, &grid, &cfg, |_, t, rho, spec| {
        let spec = spec.ok_or_else(|| invalid("spectrum missing from integrator"))?;
        let f = qfi_mixed_with_spectrum(spec, n, &z)?.density;
        let f_q_opt = if opts.optimal {
            Some(qfi_mixed_optimal(spec, n)?.sample.density)
        } else {
            None
        };
        rows.push(OpenRow {
            t,
            f_q_z: f,
            f_q_opt,
            trace: rho.trace().re,
            min_eigenvalue: spec.min_eigenvalue(),
            purity: rho.purity(),
            depth_producibility: entanglement_depth(f, n, DepthConvention::ProducibilityBound)?.depth,
            depth_linear: entanglement_depth(f, n, DepthConvention::SimpleLinear)?.depth,
        });
        Ok(())
    })?;
    Ok(OpenTrajectory {
        params: *params,
        gamma_z,
        gamma_m,
        rows,
    })
}

/// Peak QFI and certified depth at one `(gamma_z, gamma_m)` point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OpenScanPoint {
    pub gamma_z: f64,
    pub gamma_m: f64,
    pub t_max_qfi: f64,
    pub max_f_q_z: f64,
    pub depth_producibility: usize,
    pub depth_linear: usize,
}

/// Runs every rate pair of the grid. Points are independent and run on the
/// current thread pool.
pub fn open_scan(
    params: &ModelParams,
    gammas_z: &[f64],
    gammas_m: &[f64],
    opts: &OpenOptions,
) -> Result<Vec<OpenScanPoint>> {
    use rayon::prelude::*;
    let pairs: Vec<(f64, f64)> = gammas_z
        .iter()
        .flat_map(|&gz| gammas_m.iter().map(move |&gm| (gz, gm)))
        .collect();
    let n = params.n_sites;
    pairs
        .par_iter()
        .with_max_len(1)
        .map(|&(gz, gm)| {
            let traj = run_open(params, gz, gm, opts)?;
            let (t, f) = traj.max_qfi();
            Ok(OpenScanPoint {
                gamma_z: gz,
                gamma_m: gm,
                t_max_qfi: t,
                max_f_q_z: f,
                depth_producibility: entanglement_depth(f, n, DepthConvention::ProducibilityBound)?.depth,
                depth_linear: entanglement_depth(f, n, DepthConvention::SimpleLinear)?.depth,
            })
        })
        .collect()
}
