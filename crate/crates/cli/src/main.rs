//! `gg-spectra`: batch runs over the gas-giant spectral library.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gg_spectra::schrodinger1d::EtaProfile;
use gg_spectra::DomainVariant;

use config::{Format, RunConfig};
use output::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] gg_spectra::Error),
    #[error("{0} acceptance criteria failed")]
    Acceptance(usize),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_convergence() || matches!(e, gg_spectra::Error::Insufficient(_)) => 2,
            CliError::Core(_) => 1,
            CliError::Acceptance(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gg-spectra", version, about = "Spectra and Weyl laws of singular Laplacians on gas-giant manifolds")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Exponent of the metric `dx² + x^{-β} g₁`.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Sound-speed exponent, converted through `β = 2α/(2 − α)`.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// `circle:L`, `sphere:n:r`, `torus:L1,L2,...` or `file:PATH`.
    #[arg(long, global = true)]
    base: Option<String>,
    /// `compact-slab` or `truncated-cone`.
    #[arg(long, global = true)]
    variant: Option<DomainVariant>,
    #[arg(long, global = true)]
    outer_x: Option<f64>,
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    /// Relative eigenvalue tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GG_SPECTRA_WORKERS")]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived constants of the model.
    Constants,
    /// Eigenvalues of one half-line operator `P_ω` below `--lambda-max`.
    Solve1d {
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Assembled spectrum below `--lambda-max`.
    Spectrum,
    /// `N(λ)` on a geometric grid.
    Counting {
        #[arg(long)]
        points: Option<usize>,
    },
    /// Heat trace `Z(t)` with its tail bound.
    HeatTrace {
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Regime-dispatched fit of `N(λ)` against the Weyl law.
    WeylFit {
        /// `lo,hi`; defaults to `[λ_max/16, λ_max]`.
        #[arg(long, value_parser = parse_pair)]
        window: Option<(f64, f64)>,
        /// Eigenvalue budget for `A(β, n)` in the supercritical regime.
        #[arg(long)]
        z1_cut: Option<f64>,
    },
    /// Cesàro boundary mass, optionally with a density-one check.
    WeylMeasure {
        #[arg(long, value_delimiter = ',')]
        a_grid: Option<Vec<f64>>,
        /// Averaging level `Λ`; defaults to `--lambda-max`.
        #[arg(long)]
        lambda: Option<f64>,
        /// `lo,hi` interval for the density-one check.
        #[arg(long, value_parser = parse_pair)]
        interval: Option<(f64, f64)>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Eigenvalue deviation under `g₁ → (1 + εη) g₁`.
    QuasiIsometry {
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<f64>,
        /// `bump:δ` or `constant`.
        #[arg(long, value_parser = parse_eta)]
        eta: Option<EtaProfile>,
        #[arg(long)]
        j_max: Option<usize>,
    },
    /// Runs the acceptance criteria.
    Verify {
        /// all, oracles, grushin, weyl, measure, karamata, quasi-isometry.
        #[arg(long)]
        suite: Option<String>,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_eta(s: &str) -> Result<EtaProfile, String> {
    match s.split_once(':') {
        _ if s == "constant" => Ok(EtaProfile::Constant),
        Some(("bump", d)) => d
            .parse()
            .map(|support| EtaProfile::Bump { support })
            .map_err(|e| format!("bump support `{d}`: {e}")),
        _ => Err(format!("expected `bump:δ` or `constant`, got `{s}`")),
    }
}

impl Cli {
    /// Flags as a partial configuration.
    fn overrides(&self) -> RunConfig {
        let c = &self.common;
        let mut cfg = RunConfig {
            n: c.n,
            beta: c.beta,
            alpha: c.alpha,
            base: c.base.clone(),
            variant: c.variant,
            outer_x: c.outer_x,
            lambda_max: c.lambda_max,
            tol: c.tol,
            workers: c.workers,
            out: c.out.clone(),
            format: c.format,
            ..RunConfig::default()
        };
        match &self.command {
            Command::Constants | Command::Spectrum => {}
            Command::Solve1d { omega } => cfg.omega = *omega,
            Command::Counting { points } => cfg.points = *points,
            Command::HeatTrace { t_grid, points } => {
                cfg.t_grid = t_grid.clone();
                cfg.points = *points;
            }
            Command::WeylFit { window, z1_cut } => {
                cfg.window = *window;
                cfg.z1_cut = *z1_cut;
            }
            Command::WeylMeasure { a_grid, lambda, interval, epsilon } => {
                cfg.a_grid = a_grid.clone();
                cfg.lambda = *lambda;
                cfg.interval = *interval;
                cfg.epsilon = *epsilon;
            }
            Command::QuasiIsometry { eps, eta, j_max } => {
                cfg.eps = *eps;
                cfg.eta = *eta;
                cfg.j_max = *j_max;
            }
            Command::Verify { suite } => cfg.suite = suite.clone(),
        }
        cfg
    }

    fn name(&self) -> &'static str {
        match self.command {
            Command::Constants => "constants",
            Command::Solve1d { .. } => "solve1d",
            Command::Spectrum => "spectrum",
            Command::Counting { .. } => "counting",
            Command::HeatTrace { .. } => "heat-trace",
            Command::WeylFit { .. } => "weyl-fit",
            Command::WeylMeasure { .. } => "weyl-measure",
            Command::QuasiIsometry { .. } => "quasi-isometry",
            Command::Verify { .. } => "verify",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let file = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = file.merge(cli.overrides());
    let workers = match cfg.workers {
        Some(0) => return Err(config::field("workers", "must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    cfg.workers = Some(workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(format!("worker pool: {e}")))?;
    let name = cli.name();
    let result = pool.install(|| commands::dispatch(name, &cfg));
    let commands::CommandResult { outputs, summary, failed } = result?;
    if !summary.is_empty() {
        print!("{summary}");
    }
    match &cfg.out {
        Some(dir) => {
            let derived = outputs.derived_constants.clone();
            let certs = outputs.certificates.clone();
            let solves = outputs.solve_counts.clone();
            outputs.write(dir, |records| RunManifest {
                tool: "gg-spectra",
                version: env!("CARGO_PKG_VERSION"),
                library_version: gg_spectra::VERSION,
                command: name.to_string(),
                config: cfg.clone(),
                model: cfg.model().ok().and_then(|m| serde_json::to_value(m).ok()).unwrap_or_default(),
                workers,
                derived_constants: derived,
                certificates: certs,
                solve_counts: solves,
                wall_clock_seconds: start.elapsed().as_secs_f64(),
                outputs: records,
            })?;
        }
        None if summary.is_empty() => outputs.print()?,
        None => {}
    }
    if failed > 0 {
        return Err(CliError::Acceptance(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are validation failures; clap's own code 2 is reserved
    // for convergence here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
