//! `finitegap` command-line tool.
//!
//! Exit status is 0 on success and 2 for usage or I/O problems. Status 1 means
//! the computation itself failed, for example an invalid curve or a charge
//! mismatch.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "finitegap",
    version,
    about = "Finite-gap solutions of the sine-Gordon equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the reality and separation conditions of a curve file.
    Validate(Common),
    /// Normalized period data: B, U, V, A0, K and diagnostics.
    Periods(Common),
    /// Topological charges from phase winding, checked against the closed form.
    Charges(ChargesArgs),
    /// Sample exp(iu) and u on an (x, t) grid.
    Sample(SampleArgs),
    /// Period matrix along the stretching family k = 1, 2, ...
    Sweep(SweepArgs),
    /// Admissible divisors on the real ovals and their two symbol vectors.
    AdmissibleScan(ScanArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Curve file: {"real_pairs": [[lo, hi], ...], "complex_pairs": [[re, im], ...]}
    pub curve: PathBuf,
    /// Absolute tolerance of each path integral.
    #[arg(long)]
    pub tol_quadrature: Option<f64>,
    /// Target absolute error of theta evaluations.
    #[arg(long)]
    pub tol_theta: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (the default depends on the command).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct TorusArgs {
    /// Symbol vector, one +1/-1 per real pair, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Option<Vec<i8>>,
    /// Real torus coordinates, one per genus, comma separated. Drawn from --seed when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Seed for randomly drawn x0.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ChargesArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub torus: TorusArgs,
    /// Report every symbol vector instead of a single --s.
    #[arg(long)]
    pub all_s: bool,
    /// Horizon for the direct density estimate.
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub torus: TorusArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = 10)]
    pub nx: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tmin: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub tmax: f64,
    #[arg(long, default_value_t = 10)]
    pub nt: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub torus: TorusArgs,
    /// Stretch factors, increasing and at least 1.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 5.0, 10.0, 100.0, 1000.0])]
    pub k: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Grid points per oval for the initial search.
    #[arg(long)]
    pub grid: Option<usize>,
}

/// A failed run and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl From<finitegap::Error> for Failure {
    fn from(e: finitegap::Error) -> Self {
        match e {
            finitegap::Error::InvalidArgument(msg) => Failure::Usage(msg),
            other => Failure::Domain(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(c) => commands::validate(c),
        Command::Periods(c) => commands::periods(c),
        Command::Charges(a) => commands::charges(a),
        Command::Sample(a) => commands::sample(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::AdmissibleScan(a) => commands::admissible_scan(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (Failure::Domain(msg) | Failure::Usage(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
