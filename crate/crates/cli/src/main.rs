mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ScenarioConfig;
use foursurf::scenarios::{ancilla_scenario, hardy_scenario};
use foursurf::sweep::singlet_sweep;
use report::{render_report, run_scenario, sweep_csv, sweep_json, sweep_text, Format};

#[derive(Parser)]
#[command(
    name = "foursurf",
    version,
    about = "Born-rule tables on four intersecting spacelike surfaces and joint-distribution feasibility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Feasibility tolerance on the phase-1 objective
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Entangled two-qubit state with a Hadamard on each side; the zero
    /// cells force values that collide on the final surface
    Hardy {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pointer-extended variant with block Hadamards and pointer readouts
    Ancilla {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Angle sweep over the singlet with opposite local rotations
    Sweep {
        /// Start of the angle grid (radians)
        #[arg(long, default_value_t = 0.0)]
        phi_min: f64,
        /// End of the angle grid (radians)
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        phi_max: f64,
        /// Number of grid points (endpoints included)
        #[arg(long, default_value_t = 181)]
        steps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a scenario described by a config file
    Custom {
        /// Path to the TOML scenario config
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

enum CliError {
    /// Unreadable or invalid configuration: exit code 2.
    Config(String),
    /// Anything that breaks mid-run (solver failure, I/O): exit code 1.
    Internal(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Hardy { output } => {
            let scenario = hardy_scenario().map_err(internal)?;
            let report =
                run_scenario("hardy", &scenario, output.tol, false).map_err(internal)?;
            emit(&render_report(&report, output.format), &output)
        }
        Command::Ancilla { output } => {
            let scenario = ancilla_scenario().map_err(internal)?;
            let report =
                run_scenario("ancilla", &scenario, output.tol, true).map_err(internal)?;
            emit(&render_report(&report, output.format), &output)
        }
        Command::Sweep {
            phi_min,
            phi_max,
            steps,
            output,
        } => {
            let start = std::time::Instant::now();
            let rows = singlet_sweep(phi_min, phi_max, steps, output.tol).map_err(|e| match e {
                foursurf::Error::InvalidArgument(msg) => CliError::Config(msg),
                other => internal(other),
            })?;
            let rendered = match output.format {
                Format::Text => sweep_text(&rows, output.tol),
                Format::Csv => sweep_csv(&rows),
                Format::Json => {
                    sweep_json(&rows, output.tol, start.elapsed().as_secs_f64() * 1e3)
                }
            };
            emit(&rendered, &output)
        }
        Command::Custom { config, output } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            let parsed = ScenarioConfig::parse(&text).map_err(CliError::Config)?;
            let scenario = parsed.build().map_err(CliError::Config)?;
            let report =
                run_scenario(&parsed.name, &scenario, output.tol, false).map_err(internal)?;
            emit(&render_report(&report, output.format), &output)
        }
    }
}

fn internal(e: foursurf::Error) -> CliError {
    CliError::Internal(e.to_string())
}

fn emit(rendered: &str, output: &OutputArgs) -> Result<(), CliError> {
    match &output.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display()))),
    }
}
