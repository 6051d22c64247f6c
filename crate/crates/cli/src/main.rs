//! `optigraph` command line: build, inspect, solve and export the tri-level
//! scheduling model of a case described by a TOML config and CSV files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optigraph::drivers::Mode;
use optigraph::export::View;

use optigraph_cli::commands::{self, GraphFormat, ModelFormat};
use optigraph_cli::error::CliError;

#[derive(Parser)]
#[command(name = "optigraph", version, about)]
struct Cli {
    /// Case configuration (TOML).
    #[arg(long, global = true, default_value = "case.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Receding,
    Monolithic,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ViewArg {
    Full,
    Timepoints,
    Subproblems,
}

#[derive(Subcommand)]
enum Command {
    /// Build one day graph and print its size.
    Build {
        #[arg(long, default_value_t = 0)]
        day: usize,
    },
    /// Size of one day graph as JSON.
    Stats {
        #[arg(long, default_value_t = 0)]
        day: usize,
    },
    /// Run the scheduling model over consecutive days.
    Solve {
        #[arg(long, value_enum, default_value = "receding")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        days: usize,
        /// Output directory; defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the graph structure of one day.
    ExportGraph {
        #[arg(long, value_enum, default_value = "subproblems")]
        view: ViewArg,
        #[arg(long, value_enum, default_value = "graphml")]
        format: GraphFormat,
        #[arg(long, default_value_t = 0)]
        day: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the flattened model of one day, or of one subproblem alone.
    ExportModel {
        #[arg(long, value_enum, default_value = "mps")]
        format: ModelFormat,
        /// Subproblem label such as `da`, `st03` or `ha40`.
        #[arg(long)]
        subproblem: Option<String>,
        #[arg(long, default_value_t = 0)]
        day: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.config.as_path();
    match cli.command {
        Command::Build { day } => commands::build(cfg, day),
        Command::Stats { day } => commands::print_stats(cfg, day),
        Command::Solve { mode, days, out } => {
            if days == 0 {
                return Err(CliError::Usage("--days must be at least 1".into()));
            }
            let mode = match mode {
                ModeArg::Receding => Mode::Receding,
                ModeArg::Monolithic => Mode::Monolithic,
            };
            commands::solve(cfg, mode, days, out)
        }
        Command::ExportGraph {
            view,
            format,
            day,
            out,
        } => {
            let view = match view {
                ViewArg::Full => View::Full,
                ViewArg::Timepoints => View::AggregateTimepoints,
                ViewArg::Subproblems => View::AggregateSubproblems,
            };
            let path = commands::export_graph(cfg, day, view, format, out)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::ExportModel {
            format,
            subproblem,
            day,
            out,
        } => {
            let path = commands::export_model(cfg, day, format, subproblem, out)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // help and version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", err.record());
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::FAILURE
        }
    }
}
