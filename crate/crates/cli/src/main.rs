//! `quadrom`: construct, verify and evolve quadrature identities from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quadrom_core::Error;

#[derive(Debug, Parser)]
#[command(name = "quadrom", version, about = "Quadrature identities and Hele-Shaw conformal-map dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Coefficient profile, e.g. `power-x:n=1,x1=1` or `dihedral:n=2,l=1,m=2`.
    #[arg(long, global = true)]
    pub profile: Option<String>,
    /// Map spec `z1=<c>;r=<rat>;u=<c>,…` or a path to a JSON file holding one.
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// Output directory.
    #[arg(long, global = true, env = "QUADROM_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Radial Gauss–Legendre nodes of the oracle rule.
    #[arg(long, global = true, default_value_t = 48)]
    pub oracle_nr: usize,
    /// Angular trapezoid nodes of the oracle rule.
    #[arg(long, global = true, default_value_t = 256)]
    pub oracle_ntheta: usize,
    /// Finite-difference step for PDE residuals.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub fd_step: f64,
    /// Seed for random test points and test solutions.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a kernel basis and check it by finite differences.
    Basis(BasisArgs),
    /// Construct the quadrature identity of a map and verify it.
    Identity,
    /// Re-verify a stored identity.
    Verify(VerifyArgs),
    /// Evolve a map under a source-driven flow.
    Evolve(EvolveArgs),
    /// Recover a map from its moments.
    Invert(InvertArgs),
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    /// Source point; defaults to the map's `z1`, or 0.
    #[arg(long, allow_hyphen_values = true)]
    pub z1: Option<String>,
    /// Number of conjugate pairs after the constant.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Identity file; defaults to `<out>/identity.json`.
    #[arg(long)]
    pub identity: Option<PathBuf>,
    /// Number of random test solutions.
    #[arg(long, default_value_t = 6)]
    pub samples: usize,
    /// Relative tolerance for oracle agreement.
    #[arg(long, default_value_t = quadrom_core::quad_solver::ORACLE_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Source strength: a constant `q` or `t0:q0,t1:q1,…`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub q: String,
    /// Galerkin truncation degree for gauge-trivial profiles.
    #[arg(long, default_value_t = 8)]
    pub truncation: usize,
    /// Write a boundary snapshot every this many steps.
    #[arg(long, default_value_t = 20)]
    pub stride: usize,
    /// Boundary samples per snapshot.
    #[arg(long, default_value_t = 4096)]
    pub svg_samples: usize,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Target moments `M[(z − z1)^k]/π`, `k = 0, 1, …`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub targets: String,
}

/// Process exit status for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidProfile(_) | Error::InvalidMap(_) | Error::Unsupported(_) | Error::SourceOnSingularSet(_) => 2,
        Error::KernelCheck { .. } | Error::IntertwinerValidation(_) => 3,
        Error::SingularSystem { .. } => 4,
        Error::HeldOutViolation { .. } => 5,
        Error::UnivalenceLost { .. } => 6,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, exit_code);
            ExitCode::from(code)
        }
    }
}
