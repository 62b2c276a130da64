//! Peak extraction, finite-size fits and collapse diagnostics.

mod collapse;
mod fit;
mod series;

pub use collapse::{collapse_residual, collapse_residual_band, CollapseParams};
pub use fit::{fit_linear_time, fit_log_divergence, ScalingFit, ScalingKind};
pub use series::{
    find_first_peak, find_peak, find_peaks, local_maxima, PeakFit, TimeSeries, DEFAULT_PEAK_FRACTION,
};
