//! C interface to the quench simulator.
//!
//! Every function returns a `DqptStatus`; on failure a message is available
//! from `dqpt_last_error` on the calling thread. Trajectories are returned
//! as opaque handles released with `dqpt_quench_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dqpt::analysis::{find_first_peak, fit_linear_time, fit_log_divergence, ScalingFit, TimeSeries};
use dqpt::dynamics::PropagatorConfig;
use dqpt::model::ModelParams;
use dqpt::observables::{entanglement_depth, DepthConvention};
use dqpt::protocol::{run_quench, QuenchOptions, QuenchTrajectory};
use dqpt::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DqptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    CapExceeded = 4,
    Io = 5,
    Panic = 6,
}

/// Columns of a quench trajectory.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DqptColumn {
    Time = 0,
    QfiZ = 1,
    QfiOptimal = 2,
    Rate = 3,
    Loschmidt = 4,
    Energy = 5,
    Norm = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DqptConvention {
    Producibility = 0,
    Linear = 1,
}

/// Two-parameter fit: `(a, N0)` for the log law, `(alpha, beta)` for the
/// linear law.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DqptFit {
    pub p0: f64,
    pub p1: f64,
    pub residual: f64,
    pub r_squared: f64,
}

/// Opaque closed-system trajectory.
pub struct DqptQuench {
    traj: QuenchTrajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DqptStatus {
    match e.exit_code() {
        2 => DqptStatus::InvalidArgument,
        3 => DqptStatus::Numerical,
        4 => DqptStatus::CapExceeded,
        _ => DqptStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), DqptStatus>>(f: F) -> DqptStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DqptStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            DqptStatus::Panic
        }
    }
}

fn fail(e: Error) -> DqptStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> DqptStatus {
    set_error(format!("{what} is null"));
    DqptStatus::NullPointer
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], DqptStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dqpt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dqpt_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Quench from the x-polarized state. `opt_every` = 0 skips the optimal
/// direction. On success `*out` owns a new handle.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dqpt_quench_run(
    n_sites: usize,
    j: f64,
    jp: f64,
    h: f64,
    t_max: f64,
    dt: f64,
    opt_every: usize,
    out: *mut *mut DqptQuench,
) -> DqptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params = ModelParams::new(n_sites, j, jp, h).map_err(fail)?;
        let opts = QuenchOptions {
            t_max,
            propagator: PropagatorConfig {
                dt,
                ..PropagatorConfig::default()
            },
            optimal_stride: opt_every,
            ..QuenchOptions::default()
        };
        let traj = run_quench(&params, &opts).map_err(fail)?;
        *out = Box::into_raw(Box::new(DqptQuench { traj }));
        Ok(())
    })
}

/// Number of time points in a trajectory (0 for a null handle).
///
/// # Safety
/// `q` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqpt_quench_len(q: *const DqptQuench) -> usize {
    q.as_ref().map_or(0, |q| q.traj.rows.len())
}

/// Copies one column into `buf`, which must hold `len` values with `len`
/// equal to `dqpt_quench_len`. Optimal QFI entries that were not evaluated
/// are NaN.
///
/// # Safety
/// `q` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dqpt_quench_column(
    q: *const DqptQuench,
    column: DqptColumn,
    buf: *mut f64,
    len: usize,
) -> DqptStatus {
    guard(|| {
        let q = q.as_ref().ok_or_else(|| null("handle"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let rows = &q.traj.rows;
        if len != rows.len() {
            set_error(format!("buffer holds {len} values, trajectory has {}", rows.len()));
            return Err(DqptStatus::InvalidArgument);
        }
        let out = std::slice::from_raw_parts_mut(buf, len);
        for (slot, r) in out.iter_mut().zip(rows) {
            *slot = match column {
                DqptColumn::Time => r.t,
                DqptColumn::QfiZ => r.f_q_z,
                DqptColumn::QfiOptimal => r.optimal.map_or(f64::NAN, |o| o.sample.density),
                DqptColumn::Rate => r.rate,
                DqptColumn::Loschmidt => r.loschmidt,
                DqptColumn::Energy => r.energy,
                DqptColumn::Norm => r.norm,
            };
        }
        Ok(())
    })
}

/// Releases a trajectory. Null is ignored.
///
/// # Safety
/// `q` must be null or a handle from `dqpt_quench_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqpt_quench_free(q: *mut DqptQuench) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Certified entanglement depth for QFI density `f_q` on `n_sites` spins.
///
/// # Safety
/// `depth` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dqpt_entanglement_depth(
    f_q: f64,
    n_sites: usize,
    convention: DqptConvention,
    depth: *mut usize,
) -> DqptStatus {
    guard(|| {
        if depth.is_null() {
            return Err(null("depth"));
        }
        let conv = match convention {
            DqptConvention::Producibility => DepthConvention::ProducibilityBound,
            DqptConvention::Linear => DepthConvention::SimpleLinear,
        };
        *depth = entanglement_depth(f_q, n_sites, conv).map_err(fail)?.depth;
        Ok(())
    })
}

/// Earliest peak reaching `fraction` of the global maximum, refined by a
/// parabola through the three samples around it.
///
/// # Safety
/// `times` and `values` must point to `len` readable doubles; `t_c` and
/// `f_star` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dqpt_find_first_peak(
    times: *const f64,
    values: *const f64,
    len: usize,
    fraction: f64,
    t_c: *mut f64,
    f_star: *mut f64,
) -> DqptStatus {
    guard(|| {
        let t = slice_arg(times, len, "times")?;
        let v = slice_arg(values, len, "values")?;
        if t_c.is_null() || f_star.is_null() {
            return Err(null("output"));
        }
        let series = TimeSeries::new(t.to_vec(), v.to_vec(), "input").map_err(fail)?;
        let peak = find_first_peak(&series, fraction).map_err(fail)?;
        *t_c = peak.t_c;
        *f_star = peak.f_star;
        Ok(())
    })
}

fn write_fit(fit: ScalingFit, out: *mut DqptFit) {
    // SAFETY: callers check `out` for null first.
    unsafe {
        *out = DqptFit {
            p0: fit.params.0,
            p1: fit.params.1,
            residual: fit.residual,
            r_squared: fit.r_squared,
        };
    }
}

/// Fits `f* = a ln(N / N0)`.
///
/// # Safety
/// `ns` and `f_stars` must point to `len` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dqpt_fit_log_divergence(
    ns: *const usize,
    f_stars: *const f64,
    len: usize,
    out: *mut DqptFit,
) -> DqptStatus {
    guard(|| {
        let n = slice_arg(ns, len, "ns")?;
        let f = slice_arg(f_stars, len, "f_stars")?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_fit(fit_log_divergence(n, f).map_err(fail)?, out);
        Ok(())
    })
}

/// Fits `t_c = alpha N + beta`.
///
/// # Safety
/// `ns` and `t_cs` must point to `len` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dqpt_fit_linear_time(
    ns: *const usize,
    t_cs: *const f64,
    len: usize,
    out: *mut DqptFit,
) -> DqptStatus {
    guard(|| {
        let n = slice_arg(ns, len, "ns")?;
        let t = slice_arg(t_cs, len, "t_cs")?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_fit(fit_linear_time(n, t).map_err(fail)?, out);
        Ok(())
    })
}
