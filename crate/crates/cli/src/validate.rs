use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use kgvalid_core::rdf::ParseReport;
use kgvalid_core::{parse_triples, PrefixMap, Triple, Validator};

use crate::render::{self, FactOutcome};
use crate::setup::{self, Setup};
use crate::{Common, OutputFormat};

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Facts, one triple per argument (N-Triples or prefixed names).
    #[arg(value_name = "FACT")]
    facts: Vec<String>,
    /// File of facts, one triple per line.
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

/// Candidate input: the text shown to the user and the parsed fact.
pub type Input = (String, Result<Triple, String>);

/// A single fact string must hold exactly one triple and nothing else.
pub fn parse_fact(text: &str, prefixes: &PrefixMap) -> Result<Triple, String> {
    let report = parse_triples(text, prefixes);
    if let Some(d) = report.skipped().next() {
        return Err(format!("parse error: {}", d.message));
    }
    match report.triples.as_slice() {
        [t] => Ok(t.clone()),
        ts => Err(format!("parse error: expected one triple, found {}", ts.len())),
    }
}

/// Every triple of a multi-line report, plus one error entry per skipped line.
pub fn report_inputs(report: &ParseReport, lines: &[&str]) -> Vec<Input> {
    let mut inputs: Vec<(usize, Input)> = report
        .triples
        .iter()
        .zip(&report.triple_lines)
        .map(|(t, &line)| (line, (lines[line - 1].trim().to_owned(), Ok(t.clone()))))
        .collect();
    inputs.extend(report.skipped().map(|d| {
        (d.line, (lines[d.line - 1].trim().to_owned(), Err(format!("line {}: parse error: {}", d.line, d.message))))
    }));
    inputs.sort_by_key(|(line, _)| *line);
    inputs.into_iter().map(|(_, i)| i).collect()
}

pub fn validate_inputs(setup: &Setup, common: &Common, inputs: Vec<Input>) -> Vec<FactOutcome> {
    let facts: Vec<Triple> = inputs.iter().filter_map(|(_, r)| r.as_ref().ok().cloned()).collect();
    let mut results = Validator::default()
        .validate_batch(&facts, setup.backend(), &setup.encoder, common.k, setup.parallelism)
        .into_iter();
    inputs
        .into_iter()
        .map(|(input, parsed)| FactOutcome {
            input,
            result: parsed.and_then(|_| results.next().expect("one result per parsed fact").map_err(|e| e.to_string())),
        })
        .collect()
}

/// Prints the outcomes and returns the exit code.
pub fn emit(setup: &Setup, common: &Common, outcomes: &[FactOutcome], preamble: Option<serde_json::Value>) -> u8 {
    match common.output {
        OutputFormat::Json => {
            let config = render::config_json(setup.backend().name(), &setup.encoder, common.k);
            let mut doc = render::outcomes_json(config, outcomes, &setup.prefixes, common.timings);
            if let Some(extra) = preamble {
                doc["extraction"] = extra;
            }
            println!("{}", serde_json::to_string_pretty(&doc).expect("JSON value serializes"));
        }
        OutputFormat::Text => print!("{}", render::outcomes_text(outcomes, &setup.prefixes, common.timings)),
    }
    if outcomes.iter().any(|o| o.result.is_err()) {
        2
    } else {
        0
    }
}

pub fn run(args: &ValidateArgs) -> Result<u8> {
    let setup = setup::build(&args.common, true)?;
    let mut inputs: Vec<Input> =
        args.facts.iter().map(|f| (f.trim().to_owned(), parse_fact(f, &setup.prefixes))).collect();
    if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let lines: Vec<&str> = text.lines().collect();
        inputs.extend(report_inputs(&parse_triples(&text, &setup.prefixes), &lines));
    }
    if inputs.is_empty() {
        bail!("no facts given: pass facts as arguments or --file");
    }
    let outcomes = validate_inputs(&setup, &args.common, inputs);
    Ok(emit(&setup, &args.common, &outcomes, None))
}
