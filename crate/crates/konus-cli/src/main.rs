use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use konus_cli::commands::{run_index, run_transport, validate_runtime, CliError};
use konus_cli::scenario;

/// Cost-of-living index computations over scenario files.
#[derive(Parser, Debug)]
#[command(name = "konus", version, about)]
struct Cli {
    /// Scenario file path (required by `index` and `validate`).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Override the scenario's base time (must lie on the time grid).
    #[arg(long, global = true, allow_negative_numbers = true)]
    base_time: Option<f64>,

    /// Output file path; standard output when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Relative tolerance for validators.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolerance: f64,

    /// RK4 step count for `transport`.
    #[arg(long, global = true, default_value_t = 1000)]
    steps: usize,

    /// Index convention for comparison: hold the base-time utility level
    /// fixed instead of propagating costs through the adjustment.
    #[arg(long, global = true, default_value_t = false)]
    fixed_utility: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute index series and write a CSV result table.
    Index,
    /// Run the structural validators and print per-check results.
    Validate,
    /// Parallel transport a value along the line under a 1-D connection.
    Transport {
        /// Connection spec: zero, const:K, or linear:K.
        #[arg(long)]
        connection: String,
        /// Start of the transport interval.
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        /// End of the transport interval (must be >= from).
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Value to transport.
        #[arg(long, allow_negative_numbers = true)]
        initial: f64,
    },
}

fn load_runtime(cli: &Cli) -> Result<scenario::Runtime, CliError> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Input("missing --scenario PATH".to_string()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file = scenario::parse(&text).map_err(|e| CliError::Input(e.to_string()))?;
    scenario::to_runtime(&file, cli.base_time).map_err(|e| CliError::Input(e.to_string()))
}

fn emit(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Index => {
            let runtime = load_runtime(cli)?;
            let table = run_index(&runtime, cli.fixed_utility)?;
            emit(cli, &table.render())
        }
        Command::Validate => {
            let runtime = load_runtime(cli)?;
            let outcome = validate_runtime(&runtime, cli.tolerance);
            emit(cli, &outcome.render())?;
            if outcome.all_passed() {
                Ok(())
            } else {
                Err(CliError::Validation(
                    "one or more checks failed".to_string(),
                ))
            }
        }
        Command::Transport {
            connection,
            from,
            to,
            initial,
        } => {
            let printed = run_transport(connection, *from, *to, *initial, cli.steps)?;
            emit(cli, &format!("{printed}\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not errors; anything else is bad input
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // validation reports its own details on stdout
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
