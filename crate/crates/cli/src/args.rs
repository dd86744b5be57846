use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use needle_core::GammaConvention;

#[derive(Debug, Parser)]
#[command(name = "needle", version, about = "Energies and limit minimizers of thin magnetic needle domains")]
pub struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Config file of `key = value` lines; falls back to $NEEDLE_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the limit problem and write the minimizer.
    SolveLimit(SolveLimitArgs),
    /// Evaluate E_eps of a profile or shape.
    Energy(EnergyArgs),
    /// E_eps of the recovery shape against E0 over a list of eps.
    GammaSweep(GammaSweepArgs),
    /// E_eps of unit-mass ellipsoids over a list of volumes.
    ScalingSweep(ScalingSweepArgs),
    /// Minimize the limit energy by projected descent.
    Minimize(MinimizeArgs),
    /// H(A') of a profile and its semicircle stationarity check.
    Hilbert(HilbertArgs),
    /// Run the invariant suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

fn parse_convention(s: &str) -> Result<GammaConvention, needle_core::Error> {
    s.parse()
}

/// Overrides of the quadrature and spectral config keys.
#[derive(Debug, Clone, Default, Args)]
pub struct QuadArgs {
    /// |xi1| cutoff of the E_eps quadrature.
    #[arg(long)]
    pub xi1_max: Option<f64>,
    /// Fixed radial cutoff of the E_eps quadrature.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// DFT length along x1.
    #[arg(long)]
    pub n_xi1: Option<usize>,
    /// Gauss-Legendre points per radial panel.
    #[arg(long)]
    pub n_r: Option<usize>,
    /// Zero-padding factor of the 1D spectral operators.
    #[arg(long)]
    pub pad_factor: Option<usize>,
    /// Support threshold of the 2D perimeter term.
    #[arg(long)]
    pub pos_threshold: Option<f64>,
    /// Prefactor convention of the nonlocal term for n = 3: exact_mu or asymptotic.
    #[arg(long, value_parser = parse_convention)]
    pub gamma_convention: Option<GammaConvention>,
}

#[derive(Debug, Args)]
pub struct SolveLimitArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub dim: u32,
    /// Residual tolerance of the n = 3 root finder.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Grid points of the written profile.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub format: OutFormat,
    /// Solution file; the profile goes next to it as `<stem>-profile.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["profile", "shape"])))]
#[command(group(clap::ArgGroup::new("scale").required(true).args(["mu", "eps"])))]
pub struct EnergyArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub dim: u32,
    /// Cross-section CSV with header `x,A`.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Radius CSV with header `x,rho`.
    #[arg(long)]
    pub shape: Option<PathBuf>,
    /// Volume; sets eps and gamma through the scaling law.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Aspect ratio; gamma follows from eps unless --gamma is given (eps = 1 defaults to gamma = 1).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Nonlocal prefactor, only together with --eps.
    #[arg(long, requires = "eps")]
    pub gamma: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct GammaSweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub dim: u32,
    /// Cross-section CSV; defaults to the limit minimizer.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Strictly decreasing list, e.g. 0.2,0.1,0.05.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Table file (default `gamma-sweep-<n>d-<timestamp>.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct ScalingSweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub dim: u32,
    /// Strictly increasing list of volumes.
    #[arg(long, value_delimiter = ',', default_value = "1e2,1e3,1e4,1e5,1e6")]
    pub mu: Vec<f64>,
    /// Table file (default `scaling-sweep-<n>d-<timestamp>.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub dim: u32,
    /// `flat`, `gaussian` or a profile CSV of unit mass.
    #[arg(long, default_value = "flat")]
    pub init: String,
    /// Grid points of the built-in initializers on [-1.5, 1.5].
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 25)]
    pub rearrange_every: usize,
    /// Profile file (default `minimize-<n>d-<timestamp>.csv`); the trace goes to `<stem>-trace.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HilbertArgs {
    /// Cross-section CSV; defaults to the unit semicircle.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Grid points of the default semicircle on [-1.6, 1.6].
    #[arg(long, default_value_t = 8192)]
    pub grid: usize,
    /// CSV `x,H` of H(A') (default `hilbert-2d-<timestamp>.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub print_config: bool,
}
