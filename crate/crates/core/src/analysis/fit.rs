use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingKind {
    /// `f* = a log(N / N0)`, params `(a, N0)`.
    LogDivergence,
    /// `t_c = alpha N + beta`, params `(alpha, beta)`.
    LinearTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub kind: ScalingKind,
    pub params: (f64, f64),
    /// Root-mean-square misfit.
    pub residual: f64,
    pub r_squared: f64,
}

struct Line {
    slope: f64,
    intercept: f64,
    rms: f64,
    r_squared: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Result<Line> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 1e-300) {
        return Err(invalid("fit needs distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(Line {
        slope,
        intercept,
        rms: (ss_res / n).sqrt(),
        r_squared,
    })
}

fn distinct(ns: &[usize]) -> usize {
    let mut v = ns.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Least squares `f* = a ln N + b`, reported as `(a, N0 = exp(-b / a))`.
pub fn fit_log_divergence(ns: &[usize], f_stars: &[f64]) -> Result<ScalingFit> {
    if distinct(ns) < 3 {
        return Err(invalid("logarithmic fit needs at least 3 distinct sizes"));
    }
    if f_stars.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(invalid("peak values must be positive"));
    }
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let line = least_squares(&x, f_stars)?;
    let scale = f_stars.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    if line.slope <= 1e-12 * scale {
        return Err(Error::NoDivergence { a: line.slope });
    }
    Ok(ScalingFit {
        kind: ScalingKind::LogDivergence,
        params: (line.slope, (-line.intercept / line.slope).exp()),
        residual: line.rms,
        r_squared: line.r_squared,
    })
}

/// Least squares `t_c = alpha N + beta`.
pub fn fit_linear_time(ns: &[usize], t_cs: &[f64]) -> Result<ScalingFit> {
    if distinct(ns) < 2 {
        return Err(invalid("linear fit needs at least 2 distinct sizes"));
    }
    if t_cs.iter().any(|t| !t.is_finite()) {
        return Err(invalid("critical times must be finite"));
    }
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let line = least_squares(&x, t_cs)?;
    Ok(ScalingFit {
        kind: ScalingKind::LinearTime,
        params: (line.slope, line.intercept),
        residual: line.rms,
        r_squared: line.r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_log_law() {
        let ns = [8usize, 12, 16, 20];
        let f: Vec<f64> = ns.iter().map(|&n| 2.0 * (n as f64 / 3.0).ln()).collect();
        let fit = fit_log_divergence(&ns, &f).unwrap();
        assert!((fit.params.0 - 2.0).abs() < 1e-10);
        assert!((fit.params.1 - 3.0).abs() < 1e-10);
        assert!(fit.residual < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_is_flagged() {
        let r = fit_log_divergence(&[8, 10, 12], &[1.5, 1.5, 1.5]);
        assert!(matches!(r, Err(Error::NoDivergence { .. })));
        let r = fit_log_divergence(&[8, 10, 12], &[3.0, 2.0, 1.0]);
        assert!(matches!(r, Err(Error::NoDivergence { .. })));
    }

    #[test]
    fn linear_time() {
        let ns = [8usize, 10, 14, 20];
        let t: Vec<f64> = ns.iter().map(|&n| 0.25 * n as f64 + 0.3).collect();
        let fit = fit_linear_time(&ns, &t).unwrap();
        assert!((fit.params.0 - 0.25).abs() < 1e-12 && (fit.params.1 - 0.3).abs() < 1e-12);
        let two = fit_linear_time(&[8, 12], &[1.0, 5.0]).unwrap();
        assert!(two.residual < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_linear_time(&[8, 8], &[1.0, 2.0]).is_err());
        assert!(fit_log_divergence(&[8, 10, 10], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_log_divergence(&[8, 10, 12], &[1.0, -2.0, 3.0]).is_err());
        assert!(fit_linear_time(&[8, 10], &[1.0]).is_err());
    }
}
