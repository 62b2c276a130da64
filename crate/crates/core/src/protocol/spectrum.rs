use std::sync::Arc;

use serde::Serialize;

use crate::analysis::{find_first_peak, TimeSeries};
use crate::dynamics::{initial_sector, initial_state, time_grid, SpectralPropagator};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, dense_eigensystem, ModelParams};
use crate::observables::{qfi_decomposition, qfi_pure, QfiDecomposition};
use crate::spin::{build_basis, BlochDirection};

/// Diagonal and total QFI for one `(N, h)` point.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumPoint {
    pub n_sites: usize,
    pub h: f64,
    pub f_diag: f64,
    /// First pronounced maximum of the total `f_Q[S_z](t)`; NaN when the
    /// largest values sit at the end of the window.
    pub t_peak: f64,
    pub f_peak: f64,
    /// `max_t |f_diag + f_offdiag(t) - f_Q[S_z](t)|` against direct evaluation.
    pub identity_error: f64,
    #[serde(skip)]
    pub decomposition: QfiDecomposition,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    pub t_max: f64,
    pub dt: f64,
    pub peak_fraction: f64,
}

/// Exact-diagonalization split of the QFI for one parameter set, checked
/// against states propagated from the same eigensystem.
pub fn spectrum_point(params: &ModelParams, opts: &SpectrumOptions) -> Result<SpectrumPoint> {
    params.validate()?;
    let n = params.n_sites;
    let basis = Arc::new(build_basis(n, initial_sector(n))?);
    let h = build_hamiltonian(params, &basis)?;
    let eig = dense_eigensystem(&h)?;
    let psi0 = initial_state(&basis)?;
    let prop = SpectralPropagator::new(&eig, &psi0)?;
    let grid = time_grid(opts.t_max, opts.dt)?;
    let dec = qfi_decomposition(&eig, prop.coefficients(), &grid)?;
    let mut identity_error: f64 = 0.0;
    let mut totals = Vec::with_capacity(grid.len());
    for (k, &t) in grid.iter().enumerate() {
        let direct = qfi_pure(&prop.state_at(t)?, &BlochDirection::z())?.density;
        identity_error = identity_error.max((dec.total(k) - direct).abs());
        totals.push(dec.total(k));
    }
    let series = TimeSeries::new(grid, totals, format!("f_Q_z N={n} h={}", params.h))?;
    let (t_peak, f_peak) = match find_first_peak(&series, opts.peak_fraction) {
        Ok(p) => (p.t_c, p.f_star),
        Err(Error::EdgeMaximum { t }) => {
            log::warn!("N={n} h={}: no interior maximum (edge at t={t}); widen t_max", params.h);
            (f64::NAN, f64::NAN)
        }
        Err(e) => return Err(e),
    };
    Ok(SpectrumPoint {
        n_sites: n,
        h: params.h,
        f_diag: dec.f_diag,
        t_peak,
        f_peak,
        identity_error,
        decomposition: dec,
    })
}

/// `spectrum_point` over every `(N, h)` combination, sizes outermost.
/// Points run concurrently on the current thread pool.
pub fn spectrum_scan(
    base: &ModelParams,
    sizes: &[usize],
    fields: &[f64],
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumPoint>> {
    use rayon::prelude::*;
    let pairs: Vec<(usize, f64)> = sizes
        .iter()
        .flat_map(|&n| fields.iter().map(move |&h| (n, h)))
        .collect();
    pairs
        .par_iter()
        .with_max_len(1)
        .map(|&(n, h)| spectrum_point(&ModelParams::new(n, base.j, base.jp, h)?, opts))
        .collect()
}
