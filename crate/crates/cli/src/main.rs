//! `inflato`: calibrate, estimate, solve and simulate from the command line.
//!
//! Exit codes: 0 success, 1 I/O, 2 invalid input, 3 numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "inflato",
    version,
    about = "Gauge pressure and modulus estimation for inflated shells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Calibrate the scaling factor from series of known pressure.
    Calibrate(CalibrateArgs),
    /// Estimate pressure and modulus of one object.
    Estimate(EstimateArgs),
    /// Solve the nondimensional shell indentation problem.
    SolveShell(SolveShellArgs),
    /// Run a dynamic or indentation simulation.
    Simulate(SimulateArgs),
    /// Print mesh statistics and an optional local curvature fit.
    MeshInfo(MeshInfoArgs),
}

/// Where the curvature radius of the indented region comes from.
#[derive(Debug, Args)]
pub struct RadiusSource {
    /// Curvature radius in meters.
    #[arg(long, conflicts_with = "mesh")]
    pub radius: Option<f64>,
    /// OBJ mesh used to fit the radius around `--seed-vertex`.
    #[arg(long, requires = "seed_vertex")]
    pub mesh: Option<PathBuf>,
    #[arg(long)]
    pub seed_vertex: Option<usize>,
    /// Geodesic radius of the fitted patch, m. Defaults to four mean edge lengths.
    #[arg(long)]
    pub patch_radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Series CSV; repeat once per object, in the same order as `--pressure`.
    #[arg(long, required = true)]
    pub series: Vec<PathBuf>,
    /// Measured gauge pressure in Pa of the matching series.
    #[arg(long, required = true)]
    pub pressure: Vec<f64>,
    #[command(flatten)]
    pub radius: RadiusSource,
    /// Wall thickness in meters.
    #[arg(long)]
    pub thickness: f64,
    /// Average repeated samples at equal depth before fitting.
    #[arg(long)]
    pub average_levels: bool,
    /// Output calibration JSON; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub calibration: PathBuf,
    #[command(flatten)]
    pub radius: RadiusSource,
    #[arg(long)]
    pub thickness: f64,
    /// Number of radial wrinkles observed past the onset of wrinkling.
    #[arg(long)]
    pub wrinkles: Option<u32>,
    #[arg(long, default_value_t = inflato::DEFAULT_NU)]
    pub nu: f64,
    #[arg(long)]
    pub average_levels: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveShellArgs {
    #[arg(long)]
    pub radius: f64,
    #[arg(long)]
    pub thickness: f64,
    /// Young's modulus in Pa.
    #[arg(long)]
    pub modulus: f64,
    /// Gauge pressure in Pa.
    #[arg(long, required_unless_present = "tau", conflicts_with = "tau")]
    pub pressure: Option<f64>,
    /// Bendability; the pressure is derived from it.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = inflato::DEFAULT_NU)]
    pub nu: f64,
    /// Drop the bending term (default).
    #[arg(long, conflicts_with = "full")]
    pub membrane: bool,
    /// Keep the bending term with a clamped slope at the load point.
    #[arg(long)]
    pub full: bool,
    /// Dimensionless indentation depth (negative inward).
    #[arg(long = "W0", allow_hyphen_values = true)]
    pub w0: Option<f64>,
    /// Locate the onset of compressive hoop stress.
    #[arg(long)]
    pub critical: bool,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub rho_inf: Option<f64>,
    /// Output directory for `profile.csv` and `diagnostics.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// OBJ mesh replacing the scenario's icosphere.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write an OBJ file per captured frame (dynamic mode).
    #[arg(long)]
    pub obj_frames: bool,
    /// Relative Gaussian noise added to emitted indentation forces.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MeshInfoArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub seed_vertex: Option<usize>,
    #[arg(long)]
    pub patch_radius: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Calibrate(a) => commands::calibrate(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::SolveShell(a) => commands::solve_shell(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::MeshInfo(a) => commands::mesh_info(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
