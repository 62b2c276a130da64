use serde::Serialize;

use super::quench::{run_quench, QuenchOptions};
use crate::analysis::{
    collapse_residual_band, find_first_peak, fit_linear_time, fit_log_divergence, CollapseParams, PeakFit, ScalingFit,
    TimeSeries,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseWindows {
    /// Half-width of the critical region in `J |t - t_c|`.
    pub inner: f64,
    /// Outer edge of the comparison band.
    pub outer: f64,
}

impl Default for CollapseWindows {
    fn default() -> Self {
        CollapseWindows { inner: 0.5, outer: 1.5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub sizes: Vec<usize>,
    pub peaks: Vec<PeakFit>,
    pub log_fit: ScalingFit,
    pub time_fit: ScalingFit,
    pub collapse: CollapseParams,
    pub residual_inside: f64,
    pub residual_outside: f64,
    #[serde(skip)]
    pub rescaled: Vec<(usize, TimeSeries)>,
}

impl ScalingReport {
    /// `residual_outside / residual_inside`.
    pub fn collapse_ratio(&self) -> f64 {
        self.residual_outside / self.residual_inside
    }
}

/// Peaks, both fits and the collapse diagnostics from precomputed
/// `f_Q[S_z](t)` curves.
pub fn analyze_scaling(curves: &[(usize, TimeSeries)], peak_fraction: f64, windows: CollapseWindows) -> Result<ScalingReport> {
    let sizes: Vec<usize> = curves.iter().map(|(n, _)| *n).collect();
    let peaks = curves
        .iter()
        .map(|(_, s)| find_first_peak(s, peak_fraction))
        .collect::<Result<Vec<_>>>()?;
    let f_stars: Vec<f64> = peaks.iter().map(|p| p.f_star).collect();
    let t_cs: Vec<f64> = peaks.iter().map(|p| p.t_c).collect();
    let log_fit = fit_log_divergence(&sizes, &f_stars)?;
    let time_fit = fit_linear_time(&sizes, &t_cs)?;
    let collapse = CollapseParams {
        a: log_fit.params.0,
        n0: log_fit.params.1,
        alpha: time_fit.params.0,
        beta: time_fit.params.1,
    };
    let residual_inside = collapse_residual_band(curves, &collapse, -1.0, windows.inner)?;
    let residual_outside = collapse_residual_band(curves, &collapse, windows.inner, windows.outer)?;
    let rescaled = curves
        .iter()
        .map(|(n, s)| Ok((*n, collapse.rescale(*n, s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport {
        sizes,
        peaks,
        log_fit,
        time_fit,
        collapse,
        residual_inside,
        residual_outside,
        rescaled,
    })
}

/// Quench at every size (concurrently on the current pool), then
/// `analyze_scaling`.
pub fn run_scaling(
    base: &ModelParams,
    sizes: &[usize],
    opts: &QuenchOptions,
    peak_fraction: f64,
    windows: CollapseWindows,
) -> Result<(Vec<(usize, TimeSeries)>, ScalingReport)> {
    use rayon::prelude::*;
    let opts = QuenchOptions {
        optimal_stride: 0,
        husimi_times: Vec::new(),
        ..opts.clone()
    };
    let curves = sizes
        .par_iter()
        .with_max_len(1)
        .map(|&n| {
            let p = ModelParams::new(n, base.j, base.jp, base.h)?;
            Ok((n, run_quench(&p, &opts)?.qfi_z_series()?))
        })
        .collect::<Result<Vec<_>>>()?;
    if curves.len() < 3 {
        return Err(Error::InvalidArgument("scaling needs at least 3 sizes".into()));
    }
    let report = analyze_scaling(&curves, peak_fraction, windows)?;
    Ok((curves, report))
}
