//! `lanheat` — optical absorbance tables, temperature histories, parameter
//! sweeps, and analytical-vs-numerical comparisons for pulsed-laser
//! imprint stacks.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 solver failure,
//! 3 comparison threshold exceeded.

mod output;
mod physics;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use physics::Solver;

#[derive(Parser)]
#[command(
    name = "lanheat",
    version,
    about = "1D pulsed-laser heating of mold/resist/substrate imprint stacks",
    after_help = "Values given on the command line override values from --config, \
                  which override the built-in defaults."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-layer optical absorbance of the stack at one or more wavelengths
    Absorbance(AbsorbanceArgs),
    /// Temperature histories for one operating point
    Simulate(SimulateArgs),
    /// Cartesian parameter sweep with long-format CSV output
    Sweep(SweepArgs),
    /// Run both solvers and report their disagreement
    Compare(CompareArgs),
    /// Material database operations
    Materials(MaterialsArgs),
}

#[derive(Args)]
struct CommonPhysics {
    /// Substrate material name
    #[arg(long)]
    substrate: Option<String>,
    /// Laser wavelength in nm
    #[arg(long)]
    wavelength_nm: Option<u32>,
    /// Pulse fluence in J/cm²
    #[arg(long)]
    fluence_j_cm2: Option<f64>,
    /// Pulse FWHM in ns
    #[arg(long)]
    fwhm_ns: Option<f64>,
    /// Initial temperature in °C
    #[arg(long)]
    ti_c: Option<f64>,
    /// Resist thickness in nm
    #[arg(long)]
    polymer_thickness_nm: Option<f64>,
    /// Additional material definitions (TOML)
    #[arg(long)]
    materials_file: Option<PathBuf>,
    /// Run configuration file (TOML); command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Implicit-solver time step in ns
    #[arg(long)]
    dt_ns: Option<f64>,
    /// Implicit-solver minimum cell size in nm
    #[arg(long)]
    min_cell_nm: Option<f64>,
    /// Gauss-Legendre order for the analytical solver
    #[arg(long)]
    quad_order: Option<usize>,
}

#[derive(Args)]
struct AbsorbanceArgs {
    #[command(flatten)]
    physics: CommonPhysics,
    /// Wavelengths to tabulate (default: every wavelength the substrate
    /// defines)
    #[arg(long, value_delimiter = ',')]
    wavelengths_nm: Option<Vec<u32>>,
    /// Output directory for absorbance.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    physics: CommonPhysics,
    /// Solver: analytical, fdm, or both
    #[arg(long)]
    solver: Option<Solver>,
    /// Probe: depth in μm, or `polymer-center` (repeatable)
    #[arg(long)]
    probe: Option<Vec<String>>,
    /// Output directory for CSV files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG plot of the probe histories
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    physics: CommonPhysics,
    /// Substrates to sweep (comma-separated)
    #[arg(long, value_delimiter = ',')]
    substrates: Option<Vec<String>>,
    /// Wavelengths to sweep in nm (comma-separated)
    #[arg(long, value_delimiter = ',')]
    wavelengths_nm: Option<Vec<u32>>,
    /// Fluences to sweep in J/cm² (comma-separated)
    #[arg(long, value_delimiter = ',')]
    fluences_j_cm2: Option<Vec<f64>>,
    /// Pulse FWHMs to sweep in ns (comma-separated)
    #[arg(long, value_delimiter = ',')]
    fwhms_ns: Option<Vec<f64>>,
    /// Solver: analytical, fdm, or both
    #[arg(long)]
    solver: Option<Solver>,
    /// Probe: depth in μm, or `polymer-center` (repeatable)
    #[arg(long)]
    probe: Option<Vec<String>>,
    /// Maximum number of sweep points
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
    /// Output directory for sweep.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    physics: CommonPhysics,
    /// Peak-difference threshold in percent of the temperature rise
    #[arg(long, default_value_t = 5.0)]
    threshold_pct: f64,
    /// Output directory for compare.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaterialsArgs {
    #[command(subcommand)]
    command: MaterialsCommand,
}

#[derive(Subcommand)]
enum MaterialsCommand {
    /// List all known materials and their properties
    List {
        /// Additional material definitions (TOML)
        #[arg(long)]
        materials_file: Option<PathBuf>,
    },
}

/// Die quietly when a pipe reader closes early (`lanheat ... | head`),
/// like every other line-oriented tool, instead of panicking on EPIPE.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" with exit 0
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Absorbance(args) => physics::cmd_absorbance(args),
        Command::Simulate(args) => physics::cmd_simulate(args),
        Command::Sweep(args) => physics::cmd_sweep(args),
        Command::Compare(args) => physics::cmd_compare(args),
        Command::Materials(args) => match args.command {
            MaterialsCommand::List { materials_file } => {
                physics::cmd_materials_list(materials_file)
            }
        },
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
