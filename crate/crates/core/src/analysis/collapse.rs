use serde::{Deserialize, Serialize};

use super::series::TimeSeries;
use crate::error::{invalid, Result};

/// Parameters of the finite-size rescaling `x = t - (alpha N + beta)`,
/// `y = f / (a ln(N / N0))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams {
    pub a: f64,
    pub n0: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CollapseParams {
    fn validate(&self) -> Result<()> {
        let all = [self.a, self.n0, self.alpha, self.beta];
        if all.iter().any(|v| !v.is_finite()) || self.n0 <= 0.0 || self.a == 0.0 {
            return Err(invalid("collapse parameters must be finite with a != 0 and N0 > 0"));
        }
        Ok(())
    }

    pub fn critical_time(&self, n: usize) -> f64 {
        self.alpha * n as f64 + self.beta
    }

    /// Rescaled `(x, y)` points of one curve.
    pub fn rescale(&self, n: usize, series: &TimeSeries) -> Result<TimeSeries> {
        self.validate()?;
        let norm = self.a * (n as f64 / self.n0).ln();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid(format!("size {n} coincides with N0; cannot rescale")));
        }
        let t_c = self.critical_time(n);
        TimeSeries::new(
            series.times().iter().map(|t| t - t_c).collect(),
            series.values().iter().map(|v| v / norm).collect(),
            format!("{} N={n} rescaled", series.label),
        )
    }
}

/// RMS distance between two rescaled curves over the union of their
/// abscissae inside the band `inner < |x| <= outer` (with `inner < 0`
/// meaning the band includes `x = 0`) and inside both sampled ranges.
fn pair_rms(a: &TimeSeries, b: &TimeSeries, inner: f64, outer: f64) -> Option<f64> {
    let lo = a.times()[0].max(b.times()[0]);
    let hi = a.times()[a.len() - 1].min(b.times()[b.len() - 1]);
    let mut sum = 0.0;
    let mut count = 0usize;
    for &x in a.times().iter().chain(b.times()) {
        if x < lo || x > hi || x.abs() > outer || x.abs() <= inner {
            continue;
        }
        let d = a.interpolate(x)? - b.interpolate(x)?;
        sum += d * d;
        count += 1;
    }
    (count > 0).then(|| (sum / count as f64).sqrt())
}

/// Largest pairwise RMS deviation between rescaled curves within
/// `inner < |x| <= outer`.
pub fn collapse_residual_band(
    curves: &[(usize, TimeSeries)],
    params: &CollapseParams,
    inner: f64,
    outer: f64,
) -> Result<f64> {
    if curves.len() < 2 {
        return Err(invalid("collapse needs at least two curves"));
    }
    if !(outer > 0.0 && outer > inner) {
        return Err(invalid(format!("collapse band ({inner}, {outer}] is empty")));
    }
    let scaled = curves
        .iter()
        .map(|(n, s)| params.rescale(*n, s))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: Option<f64> = None;
    for i in 0..scaled.len() {
        for j in i + 1..scaled.len() {
            if let Some(r) = pair_rms(&scaled[i], &scaled[j], inner, outer) {
                worst = Some(worst.map_or(r, |w| w.max(r)));
            }
        }
    }
    worst.ok_or_else(|| invalid("rescaled curves do not overlap inside the window"))
}

/// Collapse residual inside `|x| <= window_halfwidth`.
pub fn collapse_residual(curves: &[(usize, TimeSeries)], params: &CollapseParams, window_halfwidth: f64) -> Result<f64> {
    collapse_residual_band(curves, params, -1.0, window_halfwidth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template(x: f64) -> f64 {
        1.0 + 0.5 * (-x * x).exp() + 0.1 * x
    }

    fn exact_curves(p: &CollapseParams, ns: &[usize]) -> Vec<(usize, TimeSeries)> {
        ns.iter()
            .map(|&n| {
                let times: Vec<f64> = (0..800).map(|k| k as f64 * 0.01).collect();
                let scale = p.a * (n as f64 / p.n0).ln();
                let values = times.iter().map(|&t| scale * template(t - p.critical_time(n))).collect();
                (n, TimeSeries::new(times, values, "f").unwrap())
            })
            .collect()
    }

    const P: CollapseParams = CollapseParams {
        a: 1.7,
        n0: 2.5,
        alpha: 0.2,
        beta: 1.3,
    };

    #[test]
    fn identical_curves_collapse() {
        let c = exact_curves(&P, &[10]);
        let twice = vec![c[0].clone(), c[0].clone()];
        assert_eq!(collapse_residual(&twice, &P, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn constructed_collapse() {
        let c = exact_curves(&P, &[8, 10, 12, 14]);
        // Only interpolation error of a smooth template remains.
        assert!(collapse_residual(&c, &P, 0.5).unwrap() < 1e-4);
        let wrong = CollapseParams { alpha: 0.3, ..P };
        assert!(collapse_residual(&c, &wrong, 0.5).unwrap() > 1e-2);
    }

    #[test]
    fn linear_template_is_exact() {
        let p = P;
        let curves: Vec<(usize, TimeSeries)> = [8usize, 12]
            .iter()
            .map(|&n| {
                let times: Vec<f64> = (0..500).map(|k| k as f64 * 0.01).collect();
                let scale = p.a * (n as f64 / p.n0).ln();
                let values = times.iter().map(|&t| scale * (2.0 + 0.3 * (t - p.critical_time(n)))).collect();
                (n, TimeSeries::new(times, values, "f").unwrap())
            })
            .collect();
        assert!(collapse_residual(&curves, &p, 0.5).unwrap() < 1e-10);
    }

    #[test]
    fn errors() {
        let c = exact_curves(&P, &[10]);
        assert!(collapse_residual(&c, &P, 0.5).is_err());
        let far = CollapseParams { beta: 100.0, ..P };
        let c = exact_curves(&P, &[8, 10]);
        assert!(collapse_residual(&c, &far, 0.5).is_err());
        assert!(collapse_residual_band(&c, &P, 1.5, 0.5).is_err());
    }
}
