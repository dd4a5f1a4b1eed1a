use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rateflow_cli::convert::{convert, ConvertDirection};
use rateflow_cli::exit::exit_code;
use rateflow_cli::{run, study};

#[derive(Parser)]
#[command(name = "rateflow", version, about = "Gradient flows and rate-independent paths of one-homogeneous energies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and validate the result.
    Run { config: PathBuf },
    /// Map a flow trajectory to a path or back.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        direction: ConvertDirection,
        /// Scenario config supplying the functional.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Convergence table over a halving sequence of step sizes.
    Study {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Exit 1 if the fitted order falls below this value.
        #[arg(long)]
        min_order: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    exit_code(match cli.command {
        Command::Run { config } => run::run_path(&config),
        Command::Convert { file, direction, config, output } => convert(&file, direction, &config, output.as_deref()),
        Command::Study { config, h, output, min_order } => study::study_path(&config, &h, output.as_deref(), min_order),
    })
}
