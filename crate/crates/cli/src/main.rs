mod commands;
mod config;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchArgs, CompareArgs, EvalArgs, LoocvArgs, StreamArgs, SynthArgs, TrainArgs};

/// Gait weight-distribution estimation: synthesize trials, train and evaluate
/// stance-interpolation models, and run them in a streaming loop.
#[derive(Debug, Parser)]
#[command(name = "gaitweight", version)]
struct Cli {
    /// TOML file with one table per command; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic trials as CSV files
    Synth(SynthArgs),
    /// Train a model on trial files
    Train(TrainArgs),
    /// Evaluate a model on trial files
    Eval(EvalArgs),
    /// Leave-one-user-out cross-validation over window-length variants
    Loocv(LoocvArgs),
    /// Measure per-prediction latency of the streaming path
    Bench(BenchArgs),
    /// Replay a trial through the streaming estimator
    Stream(StreamArgs),
    /// Compare streamed predictions against ground truth
    Compare(CompareArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Synth(a) => commands::synth(a, config),
        Command::Train(a) => commands::train_cmd(a, config),
        Command::Eval(a) => commands::eval(a, config),
        Command::Loocv(a) => commands::loocv_cmd(a, config),
        Command::Bench(a) => commands::bench(a, config),
        Command::Stream(a) => commands::stream(a, config),
        Command::Compare(a) => commands::compare(a, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
