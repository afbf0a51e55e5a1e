//! Command-line front end: wires ensemble specifications from flags and
//! config files to the sampling library, manages seeds and the worker pool,
//! and writes tabular outputs with metadata sidecars.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 completed without convergence (artifacts are still written).

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sigmens::sphere::Sigma;

use config::{load_config, require, resolve, Profile};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(sigmens::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(_) => 2,
        }
    }
}

fn parse_sigma(s: &str) -> Result<Sigma, String> {
    s.parse()
}

#[derive(Parser, Debug)]
#[command(
    name = "sigmens",
    version,
    about = "Random quantum states with tunable entanglement: sphere-sampled \
             bipartition spectra, MPS reconstruction, and ensemble diagnostics"
)]
struct Cli {
    /// JSON config file for the chosen subcommand (flags override it).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for data files and sidecars.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads (default: SIGMENS_THREADS env var, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Sample-count profile: paper-scale or 10x-reduced CI scale.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Paper)]
    profile: Profile,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean decreasingly-ordered eigenvalue spectrum for one (n, sigma).
    SampleSpectra(SampleSpectraArgs),
    /// Sample targets and construct one MPS; writes report.json + state.mps.
    Build(BuildArgs),
    /// Re-run the sweeping refinement on a saved state against the targets
    /// stored in its report.
    Sweep(SweepArgs),
    /// Admission rates over system sizes / bond caps, or over a sigma scan.
    Admission(AdmissionArgs),
    /// Log-spectrum regression scan over sigma; finds sigma_critical.
    PhaseDiagram(PhaseDiagramArgs),
    /// Mean entropy and effective-rank surfaces over (l, sigma).
    Surfaces(SurfacesArgs),
    /// Print closed-form oracle values for given n (and optionally L).
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Debug)]
struct SampleSpectraArgs {
    /// Subsystem Hilbert-space dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Gaussian width, or "inf" for uniform sampling.
    #[arg(long, value_parser = parse_sigma)]
    sigma: Option<Sigma>,
    /// Number of Monte Carlo draws.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Chain length L (qubits).
    #[arg(long = "L", visible_alias = "length")]
    length: Option<usize>,
    #[arg(long, value_parser = parse_sigma)]
    sigma: Option<Sigma>,
    /// Bond-dimension cap.
    #[arg(long)]
    chi: Option<usize>,
    /// Eigenvalue truncation threshold.
    #[arg(long)]
    trunc: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Sweep convergence threshold.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// MPS checkpoint produced by `build`.
    #[arg(long)]
    state: PathBuf,
    /// Report JSON carrying the target spectra.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct AdmissionArgs {
    /// One or more chain lengths.
    #[arg(long = "L", visible_alias = "length", num_args = 1..)]
    length: Vec<usize>,
    /// One or more bond-dimension caps.
    #[arg(long, num_args = 1..)]
    chi: Vec<usize>,
    /// One sigma (L scan) or several (sigma scan at fixed L, chi).
    #[arg(long, value_parser = parse_sigma, num_args = 1..)]
    sigma: Vec<Sigma>,
    /// Admission tolerance epsilon.
    #[arg(long)]
    eps: Option<f64>,
    /// States per grid cell.
    #[arg(long)]
    states: Option<usize>,
    #[arg(long)]
    trunc: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Sweep convergence threshold (defaults to eps).
    #[arg(long)]
    delta: Option<f64>,
    /// Give up after this many passes without relative improvement;
    /// 0 disables the stall exit.
    #[arg(long)]
    stall_window: Option<usize>,
}

#[derive(Args, Debug)]
struct PhaseDiagramArgs {
    /// Subsystem dimension(s): one n for a full scan table, several for the
    /// sigma_critical-vs-n boundary.
    #[arg(long, num_args = 1..)]
    n: Vec<usize>,
    #[arg(long)]
    sigma_min: Option<f64>,
    #[arg(long)]
    sigma_max: Option<f64>,
    /// Grid points, log-spaced.
    #[arg(long)]
    points: Option<usize>,
    /// Draws per grid point.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    trunc: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SurfacesArgs {
    /// Largest subsystem size l (dimension n = 2^l).
    #[arg(long)]
    l_max: Option<usize>,
    /// Sigma grid columns; defaults to a near-zero column plus a log grid
    /// on [1e-3, 1].
    #[arg(long, value_parser = parse_sigma, num_args = 1..)]
    sigma_grid: Vec<Sigma>,
    /// Draws per surface cell.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    trunc: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct OracleCheckArgs {
    /// Subsystem dimension(s).
    #[arg(long, num_args = 1.., default_values_t = [2usize, 4, 8])]
    n: Vec<usize>,
    /// Chain length for Page-entropy values.
    #[arg(long = "L", visible_alias = "length")]
    length: Option<usize>,
    /// Local Hilbert-space dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 1 };
        }
    };
    init_threads(cli.threads);
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let threads = flag.or_else(|| {
        std::env::var("SIGMENS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads.filter(|&t| t > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let out = cli.out.clone();
    let profile = cli.profile;
    let config = cli.config.as_deref();
    match cli.command {
        Command::SampleSpectra(args) => {
            let file: config::SampleSpectraFile =
                load_config(config).map_err(CliError::Config)?;
            let params = commands::SampleSpectraParams {
                n: require(args.n, file.n, "n").map_err(CliError::Config)?,
                sigma: require(args.sigma, file.sigma, "sigma").map_err(CliError::Config)?,
                samples: resolve(args.samples, file.samples, profile.spectra_samples()),
                seed: resolve(args.seed, file.seed, 0),
            };
            commands::sample_spectra(params, &out)
        }
        Command::Build(args) => {
            let file: config::BuildFile = load_config(config).map_err(CliError::Config)?;
            let params = commands::BuildParams {
                length: require(args.length, file.length, "L").map_err(CliError::Config)?,
                sigma: require(args.sigma, file.sigma, "sigma").map_err(CliError::Config)?,
                chi: require(args.chi, file.chi, "chi").map_err(CliError::Config)?,
                trunc: resolve(args.trunc, file.trunc, 1e-16),
                seed: resolve(args.seed, file.seed, 0),
                max_sweeps: resolve(args.max_sweeps, file.max_sweeps, 500),
                delta: resolve(args.delta, file.delta, 1e-4),
            };
            commands::build(params, &out)
        }
        Command::Sweep(args) => {
            let file: config::SweepFile = load_config(config).map_err(CliError::Config)?;
            let params = commands::SweepParams {
                state: args.state,
                report: args.report,
                max_sweeps: resolve(args.max_sweeps, file.max_sweeps, 500),
                delta: resolve(args.delta, file.delta, 1e-4),
            };
            commands::sweep_cmd(params, &out)
        }
        Command::Admission(args) => {
            let file: config::AdmissionFile = load_config(config).map_err(CliError::Config)?;
            let eps = require(args.eps, file.eps, "eps").map_err(CliError::Config)?;
            let length = if args.length.is_empty() {
                file.length.unwrap_or_default()
            } else {
                args.length
            };
            let chi = if args.chi.is_empty() {
                file.chi.unwrap_or_default()
            } else {
                args.chi
            };
            let sigma = if args.sigma.is_empty() {
                file.sigma.unwrap_or_else(|| vec![Sigma::Infinite])
            } else {
                args.sigma
            };
            let stall = resolve(args.stall_window, file.stall_window, 12);
            let params = commands::AdmissionParams {
                length,
                chi,
                sigma,
                eps,
                states: resolve(args.states, file.states, profile.admission_states()),
                trunc: resolve(args.trunc, file.trunc, 1e-16),
                seed: resolve(args.seed, file.seed, 0),
                max_sweeps: resolve(args.max_sweeps, file.max_sweeps, 500),
                delta: resolve(args.delta, file.delta, eps),
                stall_window: (stall > 0).then_some(stall),
            };
            commands::admission(params, &out)
        }
        Command::PhaseDiagram(args) => {
            let file: config::PhaseDiagramFile = load_config(config).map_err(CliError::Config)?;
            let n = if args.n.is_empty() {
                file.n.unwrap_or_default()
            } else {
                args.n
            };
            let params = commands::PhaseDiagramParams {
                n,
                sigma_min: resolve(args.sigma_min, file.sigma_min, 1e-4),
                sigma_max: resolve(args.sigma_max, file.sigma_max, 0.3),
                points: resolve(args.points, file.points, 30),
                samples: resolve(args.samples, file.samples, profile.scan_samples()),
                trunc: resolve(args.trunc, file.trunc, 1e-16),
                seed: resolve(args.seed, file.seed, 0),
            };
            commands::phase_diagram(params, &out)
        }
        Command::Surfaces(args) => {
            let file: config::SurfacesFile = load_config(config).map_err(CliError::Config)?;
            let sigma_grid = if args.sigma_grid.is_empty() {
                file.sigma_grid.unwrap_or_else(default_sigma_grid)
            } else {
                args.sigma_grid
            };
            let params = commands::SurfacesParams {
                l_max: resolve(args.l_max, file.l_max, 6),
                sigma_grid,
                samples: resolve(args.samples, file.samples, profile.surface_samples()),
                trunc: resolve(args.trunc, file.trunc, 1e-16),
                seed: resolve(args.seed, file.seed, 0),
            };
            commands::surfaces(params, &out)
        }
        Command::OracleCheck(args) => {
            let params = commands::OracleCheckParams {
                n: args.n,
                length: args.length,
                local_dim: args.d,
            };
            commands::oracle_check(params)
        }
    }
}

/// A near-zero column (volume-law limit) plus ten log-spaced widths on
/// [1e-3, 1].
fn default_sigma_grid() -> Vec<Sigma> {
    let mut grid = vec![Sigma::Finite(1e-9)];
    for i in 0..10 {
        let t = i as f64 / 9.0;
        grid.push(Sigma::Finite((1e-3f64.ln() * (1.0 - t)).exp()));
    }
    grid
}
