use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use priorbo::commands::{
    cmd_oracle, cmd_run, cmd_summarize, cmd_transfer_prior, OracleOptions, RunOptions, SummarizeOptions,
};
use priorbo::CliResult;

#[derive(Debug, Parser)]
#[command(name = "priorbo", version, about = "Prior-guided multi-objective Bayesian optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every template of a campaign config for each repetition.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of runs executed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Master seed; overrides `master_seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Aggregate run records into curve.csv and summary.csv.
    Summarize {
        /// Record files or glob patterns.
        #[arg(required = true)]
        records: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Hypervolume threshold for the iterations-to-threshold column.
        #[arg(long)]
        threshold: Option<f64>,
        /// Write one curve file per task instead of rejecting mixed tasks.
        #[arg(long)]
        by_task: bool,
    },
    /// Build a KDE prior from the final Pareto front of a run record.
    TransferPrior {
        record: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search the Pareto front of a task and suggest a reference point.
    Oracle {
        task: String,
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Run { config, out, jobs, seed } => {
            let manifest = cmd_run(&RunOptions { config, out, jobs, seed })?;
            println!("{} runs completed", manifest.runs.len());
        }
        Command::Summarize { records, out, threshold, by_task } => {
            for path in cmd_summarize(&SummarizeOptions { records, out, threshold, by_task })? {
                println!("wrote {}", path.display());
            }
        }
        Command::TransferPrior { record, out } => {
            let prior = cmd_transfer_prior(&record, &out)?;
            println!("wrote {} ({} components)", out.display(), prior.components());
        }
        Command::Oracle { task, grid, reps, seed, out } => {
            let (front, reference) = cmd_oracle(&OracleOptions { task, grid, reps, seed, out: out.clone() })?;
            println!("wrote {} ({} front entries)", out.display(), front.len());
            println!("suggested reference point: {reference:?}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PRIORBO_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
