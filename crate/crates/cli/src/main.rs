//! `kgvalid`: validate LLM-produced RDF facts against knowledge graphs.
//!
//! Exit codes: 0 success, 1 configuration or input-file error, 2 when at
//! least one fact failed to parse or validate (or a replay fixture is missing).

mod ask;
mod bench;
mod render;
mod setup;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "kgvalid", version, about = "Validate RDF facts against knowledge graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate facts given inline or in a file.
    Validate(validate::ValidateArgs),
    /// Prompt an LLM (or replay a fixture), extract its facts and validate them.
    Ask(ask::AskArgs),
    /// Benchmark harness.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Validate every benchmark record and write the evaluation report.
    Run(bench::RunArgs),
    /// Collection statistics: sizes, splits, dereferenceability, top predicates.
    Stats(bench::StatsArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

/// Backend, encoder and ranking options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Local N-Triples file, repeatable; each file's stem names its source graph.
    #[arg(long, value_name = "FILE")]
    kg: Vec<PathBuf>,
    /// Manifest of `source=path` lines naming local graph files.
    #[arg(long, value_name = "FILE")]
    kg_manifest: Option<PathBuf>,
    /// SPARQL endpoint URL.
    #[arg(long, value_name = "URL")]
    sparql: Option<String>,
    /// Fact-service base URL (serves `allFacts?uri=`).
    #[arg(long, value_name = "URL")]
    fact_service: Option<String>,
    /// Endpoint file with one `name, kind, url[, timeout[, rate]]` entry.
    #[arg(long, value_name = "FILE")]
    endpoints: Option<PathBuf>,
    /// `fallback` or a sidecar address (`host:port`, `unix:/path`).
    #[arg(long, default_value = "fallback")]
    encoder: String,
    /// `prefix=namespace` lines overlaid on the built-in prefixes.
    #[arg(long, value_name = "FILE")]
    prefixes: Option<PathBuf>,
    /// Number of matches to return per fact.
    #[arg(long, default_value_t = kgvalid_core::validator::DEFAULT_K)]
    k: usize,
    /// Similarity threshold for the automatic classification, in [-1, 1].
    #[arg(long, default_value_t = kgvalid_core::benchmark::DEFAULT_TAU, allow_negative_numbers = true)]
    tau: f64,
    /// Worker threads for batch validation.
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
    /// Include per-phase timings in the output.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Validate(args) => validate::run(&args),
        Command::Ask(args) => ask::run(&args),
        Command::Bench(BenchCommand::Run(args)) => bench::run(&args),
        Command::Bench(BenchCommand::Stats(args)) => bench::stats(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
