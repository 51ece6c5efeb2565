use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use kgvalid_core::llm::{
    build_prompt, extract_facts, fixture_key, LlmClient, LlmClientConfig, LlmError, LlmMode, PromptRequest,
    PromptShape, DEFAULT_FORMAT,
};
use serde_json::json;

use crate::setup;
use crate::validate::{emit, report_inputs, validate_inputs};
use crate::{Common, OutputFormat};

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Shape {
    Entity,
    Text,
    Question,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Mode {
    Replay,
    Http,
}

#[derive(Args, Debug)]
pub struct AskArgs {
    /// Question, text passage or entity name, depending on `--shape`.
    #[arg(value_name = "PAYLOAD")]
    payload: String,
    #[arg(long, value_enum, default_value = "question")]
    shape: Shape,
    /// Knowledge-graph format named in the prompt.
    #[arg(long, default_value = DEFAULT_FORMAT)]
    format_name: String,
    /// Directory of `<sha256(prompt)>.txt` response fixtures.
    #[arg(long, value_name = "DIR", default_value = "data/fixtures")]
    fixtures: PathBuf,
    #[arg(long, value_enum, default_value = "replay")]
    llm: Mode,
    /// Chat-completions base URL for `--llm http`.
    #[arg(long, value_name = "URL")]
    llm_url: Option<String>,
    #[arg(long)]
    llm_model: Option<String>,
    /// Name of the environment variable holding the API key.
    #[arg(long, value_name = "VAR")]
    llm_key_env: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn client_config(args: &AskArgs) -> LlmClientConfig {
    let mut cfg = match args.llm {
        Mode::Replay => LlmClientConfig::replay(&args.fixtures),
        Mode::Http => {
            let mut cfg = LlmClientConfig::http(kgvalid_core::llm::DEFAULT_BASE_URL);
            cfg.fixtures_dir = args.fixtures.clone();
            cfg
        }
    };
    if let Some(url) = &args.llm_url {
        cfg.base_url = url.clone();
    }
    if let Some(model) = &args.llm_model {
        cfg.model = model.clone();
    }
    if let Some(var) = &args.llm_key_env {
        cfg.api_key_env = var.clone();
    }
    cfg
}

pub fn run(args: &AskArgs) -> Result<u8> {
    let setup = setup::build(&args.common, true)?;
    let shape = match args.shape {
        Shape::Entity => PromptShape::Entity,
        Shape::Text => PromptShape::Text,
        Shape::Question => PromptShape::Question,
    };
    let prompt = build_prompt(&PromptRequest::new(shape, args.payload.clone())?.with_format(args.format_name.clone()));
    let cfg = client_config(args);
    let replay = cfg.mode == LlmMode::Replay;
    let client = LlmClient::new(cfg)?;
    let response = match client.fetch_response(&prompt) {
        Ok(r) => r,
        Err(e @ LlmError::MissingKey(_)) => return Err(e.into()),
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
    };
    let report = extract_facts(&response, &setup.prefixes);
    let lines: Vec<&str> = response.lines().collect();
    // prose around the statements is expected, so skipped lines are not errors
    let inputs: Vec<_> = report_inputs(&report, &lines).into_iter().filter(|(_, r)| r.is_ok()).collect();
    let skipped = report.skipped().count();
    let extraction = json!({
        "prompt": prompt,
        "fixture": replay.then(|| fixture_key(&prompt)),
        "extracted": inputs.len(),
        "skipped_lines": skipped,
    });
    if args.common.output == OutputFormat::Text {
        println!("prompt: {prompt}");
        if replay {
            println!("fixture: {}", fixture_key(&prompt));
        }
        println!("{} facts extracted ({skipped} skipped lines)", inputs.len());
        if inputs.is_empty() {
            return Ok(0);
        }
    }
    let outcomes = validate_inputs(&setup, &args.common, inputs);
    Ok(emit(&setup, &args.common, &outcomes, Some(extraction)))
}
