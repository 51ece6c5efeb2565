use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use kgvalid_core::benchmark::{
    benchmark_stats, evaluate, load_benchmark, render_report_text, render_stats_text, write_histogram_csv,
    write_worksheet, EvalOptions, DEFAULT_TOP_PREDICATES,
};
use kgvalid_core::Validator;

use crate::setup;
use crate::{Common, OutputFormat};

#[derive(Args, Debug)]
pub struct RunArgs {
    /// JSON-Lines benchmark file.
    #[arg(value_name = "BENCHMARK")]
    benchmark: PathBuf,
    /// Directory for report.json, report.txt, worksheet.csv and histogram.csv.
    #[arg(long, value_name = "DIR", default_value = "bench-out")]
    out_dir: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// JSON-Lines benchmark file.
    #[arg(value_name = "BENCHMARK")]
    benchmark: PathBuf,
    /// Directory for stats.json and stats.txt.
    #[arg(long, value_name = "DIR", default_value = "bench-out")]
    out_dir: PathBuf,
    /// Predicates listed per part.
    #[arg(long, default_value_t = DEFAULT_TOP_PREDICATES)]
    top_n: usize,
    #[command(flatten)]
    common: Common,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(args: &RunArgs) -> Result<u8> {
    let setup = setup::build(&args.common, true)?;
    let records = load_benchmark(&args.benchmark, &setup.prefixes)?;
    let opts = EvalOptions {
        k: args.common.k,
        tau: args.common.tau,
        parallelism: setup.parallelism,
        timings: args.common.timings,
    };
    let eval = evaluate(&records, setup.backend(), &setup.encoder, &Validator::default(), opts)?;
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;

    let json = serde_json::to_string_pretty(&eval.report)?;
    let text = render_report_text(&eval.report);
    write_text(&args.out_dir, "report.json", &(json.clone() + "\n"))?;
    write_text(&args.out_dir, "report.txt", &text)?;
    write_worksheet(&eval.outcomes, opts.k, create(&args.out_dir, "worksheet.csv")?)?;
    write_histogram_csv(&eval.report, create(&args.out_dir, "histogram.csv")?)?;

    match args.common.output {
        OutputFormat::Json => println!("{json}"),
        OutputFormat::Text => print!("{text}"),
    }
    Ok(if eval.report.errors.is_empty() { 0 } else { 2 })
}

pub fn stats(args: &StatsArgs) -> Result<u8> {
    let setup = setup::build(&args.common, false)?;
    let records = load_benchmark(&args.benchmark, &setup.prefixes)?;
    let deref = setup.backend.as_ref().and_then(|b| b.deref_check());
    let stats = benchmark_stats(&records, deref, &setup.prefixes, args.top_n);
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;

    let json = serde_json::to_string_pretty(&stats)?;
    let text = render_stats_text(&stats);
    write_text(&args.out_dir, "stats.json", &(json.clone() + "\n"))?;
    write_text(&args.out_dir, "stats.txt", &text)?;
    match args.common.output {
        OutputFormat::Json => println!("{json}"),
        OutputFormat::Text => print!("{text}"),
    }
    Ok(0)
}
