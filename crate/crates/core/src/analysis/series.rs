use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Observable sampled on an increasing time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    pub label: String,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("series times must be strictly increasing"));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(invalid("series contains non-finite entries"));
        }
        Ok(TimeSeries {
            times,
            values,
            label: label.into(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if t < first || t > last {
            return None;
        }
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return Some(self.values[0]);
        }
        if k == self.len() {
            return Some(self.values[k - 1]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(self.values[k - 1] * (1.0 - w) + self.values[k] * w)
    }
}

/// Critical time and peak value from a refined maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakFit {
    pub t_c: f64,
    pub f_star: f64,
    pub window: (f64, f64),
}

/// Discrete maximum in `window` refined by the parabola through it and its
/// two neighbours.
pub fn find_peak(series: &TimeSeries, window: (f64, f64)) -> Result<PeakFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(invalid(format!("peak window ({lo}, {hi}) is empty")));
    }
    let idx: Vec<usize> = (0..series.len())
        .filter(|&i| series.times[i] >= lo && series.times[i] <= hi)
        .collect();
    if idx.len() < 3 {
        return Err(invalid(format!(
            "peak window ({lo}, {hi}) holds {} samples; need at least 3",
            idx.len()
        )));
    }
    let mut best = idx[0];
    for &i in &idx {
        if series.values[i] > series.values[best] {
            best = i;
        }
    }
    if best == idx[0] || best == *idx.last().expect("non-empty") {
        return Err(Error::EdgeMaximum {
            t: series.times[best],
        });
    }
    let (t0, t1, t2) = (series.times[best - 1], series.times[best], series.times[best + 1]);
    let (y0, y1, y2) = (series.values[best - 1], series.values[best], series.values[best + 1]);
    // Parabola y = y1 + b (t - t1) + c (t - t1)^2 through the three points.
    let (d0, d2) = (t0 - t1, t2 - t1);
    let s0 = (y0 - y1) / d0;
    let s2 = (y2 - y1) / d2;
    let c = (s2 - s0) / (d2 - d0);
    let b = s0 - c * d0;
    let (t_c, f_star) = if c < 0.0 {
        let shift = (-b / (2.0 * c)).clamp(d0, d2);
        (t1 + shift, y1 + b * shift + c * shift * shift)
    } else {
        (t1, y1)
    };
    Ok(PeakFit {
        t_c,
        f_star: f_star.max(y1),
        window,
    })
}

/// Default height, relative to the global maximum, a local maximum must
/// reach to count as a peak.
pub const DEFAULT_PEAK_FRACTION: f64 = 0.6;

/// Interior local maxima at or above `min_value`, in time order.
pub fn local_maxima(series: &TimeSeries, min_value: f64) -> Vec<usize> {
    let v = &series.values;
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] >= min_value)
        .collect()
}

/// Refined local maxima reaching `fraction` of the global maximum.
pub fn find_peaks(series: &TimeSeries, fraction: f64) -> Result<Vec<PeakFit>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(invalid(format!("peak fraction {fraction} outside [0, 1]")));
    }
    let top = series.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    local_maxima(series, fraction * top)
        .into_iter()
        .map(|i| find_peak(series, (series.times[i - 1], series.times[i + 1])))
        .collect()
}

/// The earliest peak reaching `fraction` of the global maximum. Without
/// any interior local maximum this reports the edge holding the maximum.
pub fn find_first_peak(series: &TimeSeries, fraction: f64) -> Result<PeakFit> {
    find_peaks(series, fraction)?.into_iter().next().ok_or_else(|| {
        let (i, _) = series
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        Error::EdgeMaximum { t: series.times[i] }
    })
}
