mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "lagtop", version, about = "Generalized Lagrange top: simulation, spectral curves and monodromy")]
pub struct Cli {
    /// JSON file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file for the primary artifact (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Numeric tolerance; falls back to LAGTOP_TOL.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Disable the thread pool.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate the flow and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// First integrals at a state.
    Invariants(StateArgs),
    /// Spectral curve coefficients.
    Spectral(SpectralArgs),
    /// Samples of the discriminant and its special points.
    Discriminant(DiscriminantArgs),
    /// Monodromy of the period lattice around a loop.
    Monodromy(MonodromyArgs),
    /// Action variables of a genus-1 level set.
    Actions(ActionsArgs),
}

#[derive(Args, Debug, Default)]
pub struct StateArgs {
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// `w1,w2,w3,` then the gamma rows.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Final time.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Where to write the drift report (default stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// `h_m1,h,h1,…,h2g`.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
    /// `a1,…,a2g+2`.
    #[arg(long, allow_hyphen_values = true)]
    pub parameters: Option<String>,
}

#[derive(Args, Debug)]
pub struct DiscriminantArgs {
    /// Value of `a3` for the section.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// CSV file for the section samples.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// `c2` values for the genus-2 branch.
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<String>,
    /// Radius of the isolation scan around the origin.
    #[arg(long)]
    pub isolation_radius: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MonodromyArgs {
    #[arg(long)]
    pub g: Option<usize>,
    /// cushman, kappa1, kappa2 or kappa3.
    #[arg(long = "loop")]
    pub loop_name: Option<String>,
    /// Base point `a1,a2,a3` for a named loop.
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Closed polyline `x,y,z;x,y,z;…` instead of a named loop.
    #[arg(long, allow_hyphen_values = true)]
    pub waypoints: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub orientation: Option<i32>,
    /// auto, actions, gamma, periods or extended.
    #[arg(long)]
    pub basis: Option<String>,
    /// periods or picard-lefschetz.
    #[arg(long)]
    pub route: Option<String>,
}

#[derive(Args, Debug)]
pub struct ActionsArgs {
    /// `a1,a2,a3`.
    #[arg(long, allow_hyphen_values = true)]
    pub parameters: Option<String>,
    #[arg(long)]
    pub big_a: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
