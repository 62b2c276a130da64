//! End-to-end runs behind each command: quench trajectories, spectral
//! decomposition scans, open-system runs and finite-size sweeps.

mod open;
mod quench;
mod scaling;
mod spectrum;

pub use open::{open_scan, run_open, OpenOptions, OpenRow, OpenScanPoint, OpenTrajectory};
pub use quench::{run_quench, HusimiSnapshot, QuenchOptions, QuenchRow, QuenchTrajectory, SectorChoice};
pub use scaling::{analyze_scaling, run_scaling, CollapseWindows, ScalingReport};
pub use spectrum::{spectrum_point, spectrum_scan, SpectrumOptions, SpectrumPoint};
