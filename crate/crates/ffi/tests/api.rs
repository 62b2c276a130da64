use std::ffi::CStr;
use std::ptr;

use dqpt_ffi::*;

fn last_error() -> String {
    let p = dqpt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn quench_roundtrip() {
    let mut q: *mut DqptQuench = ptr::null_mut();
    let s = unsafe { dqpt_quench_run(6, 1.0, 0.0, 1.0, 0.5, 0.1, 2, &mut q) };
    assert_eq!(s, DqptStatus::Ok);
    assert!(dqpt_last_error().is_null());
    let len = unsafe { dqpt_quench_len(q) };
    assert_eq!(len, 6);
    let mut t = vec![0.0; len];
    let mut f = vec![0.0; len];
    let mut opt = vec![0.0; len];
    let mut norm = vec![0.0; len];
    unsafe {
        assert_eq!(dqpt_quench_column(q, DqptColumn::Time, t.as_mut_ptr(), len), DqptStatus::Ok);
        assert_eq!(dqpt_quench_column(q, DqptColumn::QfiZ, f.as_mut_ptr(), len), DqptStatus::Ok);
        assert_eq!(dqpt_quench_column(q, DqptColumn::QfiOptimal, opt.as_mut_ptr(), len), DqptStatus::Ok);
        assert_eq!(dqpt_quench_column(q, DqptColumn::Norm, norm.as_mut_ptr(), len), DqptStatus::Ok);
    }
    assert!((t[5] - 0.5).abs() < 1e-12);
    assert!((f[0] - 1.0).abs() < 1e-12);
    assert!(norm.iter().all(|x| (x - 1.0).abs() < 1e-10));
    assert!(opt[0].is_finite() && opt[1].is_nan() && opt[2].is_finite());
    let s = unsafe { dqpt_quench_column(q, DqptColumn::Rate, t.as_mut_ptr(), len - 1) };
    assert_eq!(s, DqptStatus::InvalidArgument);
    unsafe { dqpt_quench_free(q) };
    unsafe { dqpt_quench_free(ptr::null_mut()) };
}

#[test]
fn errors_carry_status_and_message() {
    let mut q: *mut DqptQuench = ptr::null_mut();
    let s = unsafe { dqpt_quench_run(0, 1.0, 0.0, 1.0, 1.0, 0.1, 0, &mut q) };
    assert_eq!(s, DqptStatus::InvalidArgument);
    assert!(q.is_null());
    assert!(!last_error().is_empty());
    let s = unsafe { dqpt_quench_run(4, 1.0, 0.0, 1.0, 1.0, 0.1, 0, ptr::null_mut()) };
    assert_eq!(s, DqptStatus::NullPointer);
    assert!(last_error().contains("out"));
    let s = unsafe { dqpt_quench_run(40, 1.0, 0.0, 1.0, 1.0, 0.1, 0, &mut q) };
    assert_eq!(s, DqptStatus::CapExceeded);
}

#[test]
fn depth_values() {
    let mut d = 0usize;
    unsafe {
        assert_eq!(dqpt_entanglement_depth(12.72, 20, DqptConvention::Producibility, &mut d), DqptStatus::Ok);
        assert_eq!(d, 16);
        assert_eq!(dqpt_entanglement_depth(12.72, 20, DqptConvention::Linear, &mut d), DqptStatus::Ok);
        assert_eq!(d, 13);
        assert_eq!(dqpt_entanglement_depth(-1.0, 20, DqptConvention::Linear, &mut d), DqptStatus::InvalidArgument);
    }
}

#[test]
fn peak_and_fits() {
    let t: Vec<f64> = (0..=300).map(|k| k as f64 * 0.01).collect();
    let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
    let (mut tc, mut fs) = (0.0, 0.0);
    let s = unsafe { dqpt_find_first_peak(t.as_ptr(), v.as_ptr(), t.len(), 0.6, &mut tc, &mut fs) };
    assert_eq!(s, DqptStatus::Ok);
    assert!((tc - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
    assert!((fs - 1.0).abs() < 1e-6);

    let ns = [8usize, 10, 12, 14];
    let f: Vec<f64> = ns.iter().map(|&n| 2.0 * (n as f64 / 3.0).ln()).collect();
    let mut fit = DqptFit::default();
    assert_eq!(unsafe { dqpt_fit_log_divergence(ns.as_ptr(), f.as_ptr(), 4, &mut fit) }, DqptStatus::Ok);
    assert!((fit.p0 - 2.0).abs() < 1e-10 && (fit.p1 - 3.0).abs() < 1e-9);
    let tc: Vec<f64> = ns.iter().map(|&n| 0.25 * n as f64 + 0.1).collect();
    assert_eq!(unsafe { dqpt_fit_linear_time(ns.as_ptr(), tc.as_ptr(), 4, &mut fit) }, DqptStatus::Ok);
    assert!((fit.p0 - 0.25).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
    assert_eq!(
        unsafe { dqpt_fit_log_divergence(ptr::null(), f.as_ptr(), 4, &mut fit) },
        DqptStatus::NullPointer
    );
}

#[test]
fn header_lists_entry_points() {
    let header = include_str!("../include/dqpt.h");
    for name in [
        "dqpt_last_error",
        "dqpt_version",
        "dqpt_quench_run",
        "dqpt_quench_column",
        "dqpt_quench_free",
        "dqpt_entanglement_depth",
        "dqpt_find_first_peak",
        "dqpt_fit_log_divergence",
        "dqpt_fit_linear_time",
        "DQPT_STATUS_CAP_EXCEEDED",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let v = unsafe { CStr::from_ptr(dqpt_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
