mod commands;
mod report;
mod surface;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercurv_core::geometry::GeometryError;
use hypercurv_core::quadric::QuadricError;
use hypercurv_core::solver::SolverError;
use hypercurv_core::systems::SystemsError;
use thiserror::Error;

use commands::Context;
use report::{RunReport, Settings};
use surface::Surface;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}; raise the limit with --budget")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Geometry(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            SolverError::NotSquare { .. } | SolverError::ConstantEquation(_) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<SystemsError> for CliError {
    fn from(e: SystemsError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QuadricError> for CliError {
    fn from(e: QuadricError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Curvature invariants of algebraic surfaces.
#[derive(Debug, Parser)]
#[command(name = "hypercurv", version)]
struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Surface membership and reality tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Largest number of homotopy paths allowed.
    #[arg(long, global = true, default_value_t = 50_000)]
    budget: u64,
    /// Worker threads for path tracking.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    /// Diagonal quadric a1*x1^2 + ... + an*xn^2 = 1, as a1,...,an.
    #[arg(long, allow_hyphen_values = true)]
    quadric: Option<String>,
    /// Polynomial in x1, x2, ...
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Principal curvatures at a point.
    Curvature {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Complex and real umbilical points of a surface in 3-space.
    Umbilics {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Critical curvature points.
    Critcurv {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Flexes of a plane curve given by a form in x1, x2, x3.
    Flexes {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Degree counts for a general surface of degree d.
    Counts {
        #[arg(long)]
        degree: u64,
    },
    /// Chow-ring computation behind the degree counts.
    Chow {
        #[arg(long)]
        degree: u64,
    },
}

fn surface_of(args: &SurfaceArgs, min_vars: usize) -> Result<Surface, CliError> {
    Surface::from_args(args.quadric.as_deref(), args.poly.as_deref(), min_vars)
}

fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let ctx = Context { seed: cli.seed, tol: cli.tol, budget: cli.budget, threads: cli.threads };
    let settings = Settings { seed: cli.seed, tol: cli.tol, budget: cli.budget };
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Curvature { surface, point } => {
            let n = point.split(',').count();
            let s = surface_of(surface, n)?;
            let mut r = RunReport::new(format!("curvature {} --point {point}", s.echo()), settings);
            r.surface = Some(s.describe());
            commands::curvature(&ctx, &s, point, &mut r)?;
            r
        }
        Command::Umbilics { surface } => {
            let s = surface_of(surface, 3)?;
            let mut r = RunReport::new(format!("umbilics {}", s.echo()), settings);
            r.surface = Some(s.describe());
            commands::umbilics(&ctx, &s, &mut r)?;
            r
        }
        Command::Critcurv { surface } => {
            let s = surface_of(surface, 3)?;
            let mut r = RunReport::new(format!("critcurv {}", s.echo()), settings);
            r.surface = Some(s.describe());
            commands::critcurv(&ctx, &s, &mut r)?;
            r
        }
        Command::Flexes { poly } => {
            let s = Surface::from_args(None, Some(poly), 3)?;
            let mut r = RunReport::new(format!("flexes {}", s.echo()), settings);
            r.surface = Some(s.describe());
            commands::flexes(&ctx, &s, &mut r)?;
            r
        }
        Command::Counts { degree } => {
            let mut r = RunReport::new(format!("counts --degree {degree}"), settings);
            commands::counts(*degree, &mut r)?;
            r
        }
        Command::Chow { degree } => {
            let mut r = RunReport::new(format!("chow --degree {degree}"), settings);
            commands::chow(*degree, &mut r)?;
            r
        }
    };
    if cli.timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

fn emit(cli: &Cli, report: &RunReport) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match cli.format {
        Format::Json => report::write_json(report, &mut sink)?,
        Format::Csv => report::write_csv(report, &mut sink)?,
    }
    sink.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = std::panic::catch_unwind(|| run(&cli));
    let report = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
        Err(_) => return ExitCode::from(1),
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
