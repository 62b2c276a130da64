use rayon::prelude::*;
use serde::Serialize;

use super::output::{OutputDir, Table};
use super::{Command, Common, HusimiArgs, OpenArgs, PropagatorArgs, QuenchArgs, ScalingArgs, SpectrumArgs};
use crate::analysis::{find_first_peak, PeakFit, TimeSeries};
use crate::dynamics::PropagatorConfig;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::protocol::{
    analyze_scaling, run_open, run_quench, spectrum_point, spectrum_scan, CollapseWindows, OpenOptions,
    OpenTrajectory, QuenchOptions, QuenchTrajectory, SpectrumOptions,
};

pub(super) const QUENCH_DT: f64 = 0.01;
pub(super) const OPEN_DT: f64 = 0.05;

pub(super) fn dispatch(command: &Command, out: &mut OutputDir) -> Result<()> {
    match command {
        Command::Quench(a) => cmd_quench(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Husimi(a) => cmd_husimi(a, out),
        Command::Open(a) => cmd_open(a, out),
        Command::Scaling(a) => cmd_scaling(a, out),
    }
}

fn quench_options(common: &Common, prop: &PropagatorArgs) -> QuenchOptions {
    QuenchOptions {
        t_max: common.tmax,
        propagator: PropagatorConfig {
            method: prop.method.into(),
            dt: common.dt_or(QUENCH_DT),
            krylov_dim: prop.krylov_dim,
            tol: prop.tol,
        },
        sector: common.sector.into(),
        ..QuenchOptions::default()
    }
}

/// First pronounced peak, or `None` when the maximum sits at the window edge.
fn optional_peak(series: &TimeSeries, fraction: f64) -> Result<Option<PeakFit>> {
    match find_first_peak(series, fraction) {
        Ok(p) => Ok(Some(p)),
        Err(Error::EdgeMaximum { t }) => {
            log::warn!("{}: maximum at window edge t = {t}", series.label);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

pub fn quench_table(traj: &QuenchTrajectory) -> Table {
    let mut t = Table::new(&[
        "t", "f_Q_z", "f_Q_opt", "n_opt_x", "n_opt_y", "n_opt_z", "lambda", "loschmidt", "energy", "norm",
        "delta_phi",
    ]);
    for r in &traj.rows {
        let dir = r.optimal.map(|o| o.sample.direction.components());
        t.push(vec![
            r.t.into(),
            r.f_q_z.into(),
            r.optimal.map(|o| o.sample.density).into(),
            dir.map(|d| d[0]).into(),
            dir.map(|d| d[1]).into(),
            dir.map(|d| d[2]).into(),
            r.rate.into(),
            r.loschmidt.into(),
            r.energy.into(),
            r.norm.into(),
            r.delta_phi.into(),
        ]);
    }
    t
}

#[derive(Serialize)]
struct QuenchSummary {
    params: ModelParams,
    first_peak: Option<PeakFit>,
    max_f_q_opt: Option<f64>,
}

fn cmd_quench(a: &QuenchArgs, out: &mut OutputDir) -> Result<()> {
    let params = a.common.model()?;
    let opts = QuenchOptions {
        optimal_stride: a.opt_every,
        ..quench_options(&a.common, &a.propagator)
    };
    let traj = run_quench(&params, &opts)?;
    out.table("quench", &quench_table(&traj))?;
    let max_f_q_opt = traj
        .rows
        .iter()
        .filter_map(|r| r.optimal.map(|o| o.sample.density))
        .reduce(f64::max);
    out.json(
        "summary",
        &QuenchSummary {
            params,
            first_peak: optional_peak(&traj.qfi_z_series()?, a.peak_fraction)?,
            max_f_q_opt,
        },
    )
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut OutputDir) -> Result<()> {
    let ns = if a.ns.is_empty() { vec![a.common.require_n()?] } else { a.ns.clone() };
    let opts = SpectrumOptions {
        t_max: a.common.tmax,
        dt: a.common.dt_or(QUENCH_DT),
        peak_fraction: a.peak_fraction,
    };
    let base = ModelParams::new(ns[0], a.common.j, a.common.jp, a.common.h.unwrap_or(0.0))?;
    let scan = spectrum_scan(&base, &ns, &a.h_values, &opts)?;
    let mut table = Table::new(&["n", "h", "f_diag", "t_peak", "f_peak", "identity_error"]);
    for p in &scan {
        table.push(vec![
            p.n_sites.into(),
            p.h.into(),
            p.f_diag.into(),
            p.t_peak.into(),
            p.f_peak.into(),
            p.identity_error.into(),
        ]);
    }
    out.table("spectrum_scan", &table)?;

    // Peak comparison and full time traces at the field given by --h.
    if let Some(h) = a.common.h {
        let points = ns
            .par_iter()
            .with_max_len(1)
            .map(|&n| spectrum_point(&a.common.model_with_n(n)?, &opts))
            .collect::<Result<Vec<_>>>()?;
        let mut peaks = Table::new(&["n", "h", "f_diag", "t_peak", "f_peak", "diag_fraction", "identity_error"]);
        for p in &points {
            peaks.push(vec![
                p.n_sites.into(),
                h.into(),
                p.f_diag.into(),
                p.t_peak.into(),
                p.f_peak.into(),
                (p.f_diag / p.f_peak).into(),
                p.identity_error.into(),
            ]);
            let d = &p.decomposition;
            let mut trace = Table::new(&["t", "f_diag", "f_offdiag", "f_total"]);
            for (k, &t) in d.times.iter().enumerate() {
                trace.push(vec![t.into(), d.f_diag.into(), d.f_offdiag[k].into(), d.total(k).into()]);
            }
            out.table(&format!("decomposition_n{}", p.n_sites), &trace)?;
        }
        out.table("spectrum_peaks", &peaks)?;
    }
    Ok(())
}

fn cmd_husimi(a: &HusimiArgs, out: &mut OutputDir) -> Result<()> {
    let params = a.common.model()?;
    let last = a.husimi_times.iter().copied().fold(0.0, f64::max);
    if last > a.common.tmax + 1e-12 || a.husimi_times.iter().any(|t| *t < 0.0) {
        return Err(Error::Config(format!("--husimi-times must lie in [0, {}]", a.common.tmax)));
    }
    let base = quench_options(&a.common, &a.propagator);
    let dt = base.propagator.dt;
    let opts = QuenchOptions {
        t_max: ((last / dt).round() * dt).min(a.common.tmax),
        optimal_stride: 0,
        husimi_times: a.husimi_times.clone(),
        husimi_nodes: (a.theta_nodes, a.phi_nodes),
        ..base
    };
    let traj = run_quench(&params, &opts)?;
    let mut summary = Table::new(&[
        "index", "t", "integral", "polar_cap_mass", "theta_max", "phi_max", "q_max", "f_Q_z",
    ]);
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let mut grid = Table::new(&["theta", "phi", "q"]);
        for ((i, j), &q) in snap.grid.values.indexed_iter() {
            grid.push(vec![snap.grid.theta[i].into(), snap.grid.phi[j].into(), q.into()]);
        }
        out.table(&format!("husimi_{k}"), &grid)?;
        let (th, ph, q) = snap.grid.argmax();
        let f = traj
            .rows
            .iter()
            .find(|r| r.t == snap.t)
            .map(|r| r.f_q_z);
        summary.push(vec![
            k.into(),
            snap.t.into(),
            snap.integral.into(),
            snap.polar_cap_mass.into(),
            th.into(),
            ph.into(),
            q.into(),
            f.into(),
        ]);
    }
    out.table("husimi_summary", &summary)
}

pub fn open_table(traj: &OpenTrajectory) -> Table {
    let mut t = Table::new(&[
        "t", "f_Q_z", "f_Q_opt", "trace", "min_eigenvalue", "purity", "depth_producibility", "depth_linear",
    ]);
    for r in &traj.rows {
        t.push(vec![
            r.t.into(),
            r.f_q_z.into(),
            r.f_q_opt.into(),
            r.trace.into(),
            r.min_eigenvalue.into(),
            r.purity.into(),
            r.depth_producibility.into(),
            r.depth_linear.into(),
        ]);
    }
    t
}

fn cmd_open(a: &OpenArgs, out: &mut OutputDir) -> Result<()> {
    let params = a.common.model()?;
    let opts = OpenOptions {
        t_max: a.common.tmax,
        dt: a.common.dt_or(OPEN_DT),
        tol: a.tol,
        optimal: a.optimal,
    };
    if !a.scan {
        let traj = run_open(&params, a.gamma_z, a.gamma_m, &opts)?;
        return out.table("open", &open_table(&traj));
    }
    let pairs: Vec<(usize, usize)> = (0..a.gz_values.len())
        .flat_map(|i| (0..a.gm_values.len()).map(move |k| (i, k)))
        .collect();
    // Each grid point keeps its own trajectory; the table is assembled after all finish.
    let runs = pairs
        .par_iter()
        .with_max_len(1)
        .map(|&(i, k)| run_open(&params, a.gz_values[i], a.gm_values[k], &opts).map(|t| (i, k, t)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "gamma_z", "gamma_m", "t_max_qfi", "max_f_Q_z", "depth_producibility", "depth_linear",
    ]);
    for (i, k, traj) in &runs {
        out.table(&format!("open_gz{i}_gm{k}"), &open_table(traj))?;
        let (t, f) = traj.max_qfi();
        let best = traj.rows.iter().find(|r| r.t == t).expect("maximum comes from a row");
        table.push(vec![
            traj.gamma_z.into(),
            traj.gamma_m.into(),
            t.into(),
            f.into(),
            best.depth_producibility.into(),
            best.depth_linear.into(),
        ]);
    }
    out.table("open_scan", &table)
}

#[derive(Serialize)]
struct ScalingJson<'a> {
    report: &'a crate::protocol::ScalingReport,
    collapse_ratio: f64,
    windows: (f64, f64),
}

fn cmd_scaling(a: &ScalingArgs, out: &mut OutputDir) -> Result<()> {
    if a.ns.len() < 3 {
        return Err(Error::Config("--ns needs at least 3 chain lengths".into()));
    }
    let opts = QuenchOptions {
        optimal_stride: 0,
        ..quench_options(&a.common, &a.propagator)
    };
    let curves = a
        .ns
        .par_iter()
        .with_max_len(1)
        .map(|&n| Ok((n, run_quench(&a.common.model_with_n(n)?, &opts)?.qfi_z_series()?)))
        .collect::<Result<Vec<_>>>()?;
    for (n, s) in &curves {
        let mut t = Table::new(&["t", "f_Q_z"]);
        for (x, y) in s.times().iter().zip(s.values()) {
            t.push(vec![(*x).into(), (*y).into()]);
        }
        out.table(&format!("curve_n{n}"), &t)?;
    }
    let windows = CollapseWindows {
        inner: a.inner,
        outer: a.outer,
    };
    let report = analyze_scaling(&curves, a.peak_fraction, windows)?;
    let mut peaks = Table::new(&["n", "t_c", "f_star"]);
    for (n, p) in report.sizes.iter().zip(&report.peaks) {
        peaks.push(vec![(*n).into(), p.t_c.into(), p.f_star.into()]);
    }
    out.table("peaks", &peaks)?;
    for (n, s) in &report.rescaled {
        let mut t = Table::new(&["x", "y"]);
        for (x, y) in s.times().iter().zip(s.values()) {
            t.push(vec![(*x).into(), (*y).into()]);
        }
        out.table(&format!("rescaled_n{n}"), &t)?;
    }
    out.json(
        "fits",
        &ScalingJson {
            report: &report,
            collapse_ratio: report.collapse_ratio(),
            windows: (a.inner, a.outer),
        },
    )
}
