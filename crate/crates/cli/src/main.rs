use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trackcop_cli::{Failure, Settings};

/// Copulas with a prescribed track section.
#[derive(Parser)]
#[command(name = "trackcop", version)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Uniform mesh size; section knots and their track images are added.
    #[arg(long, global = true)]
    mesh: Option<usize>,
    /// Slack for admissibility and eligibility checks.
    #[arg(long, global = true, env = "TRACKCOP_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the admissibility conditions and whether any copula exists.
    Validate { problem: PathBuf },
    /// Write the least and greatest eligible psi.
    Bounds { problem: PathBuf },
    /// Build C_psi on a mesh with its region boundaries and a copula report.
    Build {
        problem: PathBuf,
        /// lower, upper, blend:t or a function CSV; overrides the problem file.
        #[arg(long)]
        psi: Option<String>,
    },
    /// Compare two constructed copulas for the same problem.
    Compare { problem: PathBuf, psi_a: String, psi_b: String },
    /// Replace a grid copula by the constructed copula dominating it.
    Envelope { grid: PathBuf, problem: PathBuf },
    /// Splice two constructed copulas along the track.
    Splice {
        problem: PathBuf,
        /// psi used on and above the track.
        upper: String,
        /// psi used below the track.
        lower: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = Settings { out: cli.out, mesh: cli.mesh, tol: cli.tol, quiet: cli.quiet };
    let result: Result<i32, Failure> = match &cli.command {
        Command::Validate { problem } => trackcop_cli::validate(problem, &settings),
        Command::Bounds { problem } => trackcop_cli::bounds(problem, &settings),
        Command::Build { problem, psi } => trackcop_cli::build(problem, psi.as_deref(), &settings),
        Command::Compare { problem, psi_a, psi_b } => trackcop_cli::compare(problem, psi_a, psi_b, &settings),
        Command::Envelope { grid, problem } => trackcop_cli::envelope(grid, problem, &settings),
        Command::Splice { problem, upper, lower } => trackcop_cli::splice(problem, upper, lower, &settings),
    };
    let code = result.unwrap_or_else(|failure| {
        eprintln!("error: {failure}");
        failure.exit_code()
    });
    ExitCode::from(code as u8)
}
