//! Command-line front end: argument and config-file parsing, dispatch to
//! the protocols, and result files.

mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dynamics::Method;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::protocol::SectorChoice;

pub use config::{merge_config_file, parse_config_text};
pub use output::{format_real, Cell, Format, OutputDir, Table};

#[derive(Debug, Parser)]
#[command(name = "dqpt", version, about = "Quench dynamics, QFI and Loschmidt echoes of Ising chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-system trajectory: QFI, optimal direction, rate function.
    Quench(QuenchArgs),
    /// Diagonal and off-diagonal QFI from exact diagonalization.
    Spectrum(SpectrumArgs),
    /// Husimi snapshots and polar-cap masses.
    Husimi(HusimiArgs),
    /// Dephasing and decay via the master equation.
    Open(OpenArgs),
    /// Finite-size sweep: peak fits and rescaled curves.
    Scaling(ScalingArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Krylov,
    Spectral,
    Expm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Krylov => Method::Krylov,
            MethodArg::Spectral => Method::Spectral,
            MethodArg::Expm => Method::DenseExpm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SectorArg {
    Auto,
    Full,
}

impl From<SectorArg> for SectorChoice {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::Auto => SectorChoice::Auto,
            SectorArg::Full => SectorChoice::Full,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Flat `key = value` file with long flag names as keys.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Chain length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Nearest-neighbour coupling.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    /// Next-nearest-neighbour coupling.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub jp: f64,
    /// Post-quench transverse field.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// End of the time window in units of 1/J.
    #[arg(long, default_value_t = 8.0)]
    pub tmax: f64,
    /// Output grid spacing [default: 0.01, open: 0.05].
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = SectorArg::Auto)]
    pub sector: SectorArg,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Concurrent sweep points [default: available cores].
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Integrator settings for closed-system runs.
#[derive(Clone, Debug, Args)]
pub struct PropagatorArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Krylov)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 30)]
    pub krylov_dim: usize,
    /// Local error tolerance per step.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Clone, Debug, Args)]
pub struct QuenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub propagator: PropagatorArgs,
    /// Evaluate the optimal direction every k-th grid point (0 = never).
    #[arg(long, default_value_t = 1)]
    pub opt_every: usize,
    /// Fraction of the global maximum a local maximum must reach to count as a peak.
    #[arg(long, default_value_t = crate::analysis::DEFAULT_PEAK_FRACTION)]
    pub peak_fraction: f64,
}

#[derive(Clone, Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    /// Chain lengths [default: --n].
    #[arg(long, value_delimiter = ',')]
    pub ns: Vec<usize>,
    /// Fields of the diagonal scan.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
          default_value = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2,2.5,3")]
    pub h_values: Vec<f64>,
    #[arg(long, default_value_t = crate::analysis::DEFAULT_PEAK_FRACTION)]
    pub peak_fraction: f64,
}

#[derive(Clone, Debug, Args)]
pub struct HusimiArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub propagator: PropagatorArgs,
    /// Snapshot times (snapped to the grid).
    #[arg(long, value_delimiter = ',', required = true)]
    pub husimi_times: Vec<f64>,
    #[arg(long, default_value_t = crate::observables::DEFAULT_HUSIMI_NODES)]
    pub theta_nodes: usize,
    #[arg(long, default_value_t = crate::observables::DEFAULT_HUSIMI_NODES)]
    pub phi_nodes: usize,
}

#[derive(Clone, Debug, Args)]
pub struct OpenArgs {
    #[command(flatten)]
    pub common: Common,
    /// Dephasing rate.
    #[arg(long, default_value_t = 0.0)]
    pub gamma_z: f64,
    /// Decay rate.
    #[arg(long, default_value_t = 0.0)]
    pub gamma_m: f64,
    /// Integrator tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Also evaluate the optimal direction at every grid point.
    #[arg(long)]
    pub optimal: bool,
    /// Run the rate grid instead of a single trajectory.
    #[arg(long)]
    pub scan: bool,
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1")]
    pub gz_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1")]
    pub gm_values: Vec<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub propagator: PropagatorArgs,
    /// Chain lengths of the sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = crate::analysis::DEFAULT_PEAK_FRACTION)]
    pub peak_fraction: f64,
    /// Half-width of the critical region.
    #[arg(long, default_value_t = 0.5)]
    pub inner: f64,
    /// Outer edge of the comparison band.
    #[arg(long, default_value_t = 1.5)]
    pub outer: f64,
}

impl Common {
    pub fn dt_or(&self, default: f64) -> f64 {
        self.dt.unwrap_or(default)
    }

    pub fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::Config("--n is required".into()))
    }

    pub fn require_h(&self) -> Result<f64> {
        self.h.ok_or_else(|| Error::Config("--h is required".into()))
    }

    pub fn model(&self) -> Result<ModelParams> {
        ModelParams::new(self.require_n()?, self.j, self.jp, self.require_h()?)
    }

    pub fn model_with_n(&self, n: usize) -> Result<ModelParams> {
        ModelParams::new(n, self.j, self.jp, self.require_h()?)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tmax > 0.0 && self.tmax.is_finite()) {
            return Err(Error::Config(format!("--tmax must be positive, got {}", self.tmax)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("--dt must be positive, got {dt}")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        Ok(())
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Quench(_) => "quench",
            Command::Spectrum(_) => "spectrum",
            Command::Husimi(_) => "husimi",
            Command::Open(_) => "open",
            Command::Scaling(_) => "scaling",
        }
    }

    /// Output grid spacing after applying the per-command default.
    pub fn dt(&self) -> f64 {
        let default = match self {
            Command::Open(_) => commands::OPEN_DT,
            _ => commands::QUENCH_DT,
        };
        self.common().dt_or(default)
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Quench(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Husimi(a) => &a.common,
            Command::Open(a) => &a.common,
            Command::Scaling(a) => &a.common,
        }
    }
}

/// Everything needed to re-run a job: the subcommand and every resolved
/// flag, including defaults.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub program: &'static str,
    pub version: &'static str,
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub files: Vec<String>,
}

impl Manifest {
    /// The flags as a config file accepted by `--config`.
    pub fn config_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.flags {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

fn resolved_flags(cmd: &clap::Command, matches: &ArgMatches) -> BTreeMap<String, String> {
    let mut flags = BTreeMap::new();
    for arg in cmd.get_arguments() {
        let Some(long) = arg.get_long() else { continue };
        if long == "config" || long == "help" || long == "version" {
            continue;
        }
        let id = arg.get_id().as_str();
        if let Ok(Some(raw)) = matches.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            flags.insert(long.to_string(), vals.join(","));
        }
    }
    flags
}

/// Parses arguments (after config-file expansion) into the command and its
/// manifest skeleton.
pub fn parse_args(argv: Vec<OsString>) -> Result<std::result::Result<(Command, Manifest), clap::Error>> {
    let root = Cli::command();
    let argv = merge_config_file(&root, argv)?;
    let matches = match root.clone().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => return Ok(Err(e)),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let sub_cmd = root.find_subcommand(name).expect("parsed subcommand exists");
    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: name.to_string(),
        flags: resolved_flags(sub_cmd, sub_matches),
        files: Vec::new(),
    };
    Ok(Ok((cli.command, manifest)))
}

/// Runs a parsed command inside a pool sized by `--workers` and writes the
/// manifest last.
pub fn execute(command: &Command, mut manifest: Manifest) -> Result<OutputDir> {
    let common = command.common();
    common.validate()?;
    manifest.flags.entry("dt".into()).or_insert_with(|| command.dt().to_string());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut out = OutputDir::create(&common.out, common.format)?;
    pool.install(|| commands::dispatch(command, &mut out))?;
    out.text("run.conf", &manifest.config_text())?;
    manifest.files = out.files().to_vec();
    manifest.files.push("manifest.json".into());
    out.json("manifest", &manifest)?;
    Ok(out)
}

/// Full entry point; returns the process exit code.
pub fn run(argv: Vec<OsString>) -> i32 {
    let parsed = match parse_args(argv) {
        Ok(Ok(p)) => p,
        Ok(Err(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let (command, manifest) = parsed;
    match execute(&command, manifest) {
        Ok(out) => {
            log::info!("wrote {} files to {}", out.files().len(), out.path().display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
