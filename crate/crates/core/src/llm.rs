//! Prompt construction, LLM response retrieval (fixture replay or a minimal
//! chat-completion client) and fact extraction from free-form responses.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::{parse_triples, ParseReport, PrefixMap};
use crate::remote::{HttpClient, RemoteError, RetryPolicy, DEFAULT_MAX_RETRIES, DEFAULT_RATE_LIMIT};

pub const DEFAULT_FORMAT: &str = "DBpedia";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";
pub const DEFAULT_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("prompt payload is empty")]
    EmptyPayload,
    #[error("fixtures directory {0} does not exist")]
    FixturesDir(PathBuf),
    #[error("no fixture for prompt hash {hash} (expected {path})")]
    NoFixture { hash: String, path: PathBuf },
    #[error("reading fixture {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("environment variable {0} holding the API key is not set")]
    MissingKey(String),
    #[error(transparent)]
    Remote(#[from] RemoteError),
    #[error("chat-completion response has no choices[0].message.content")]
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptShape {
    Entity,
    Text,
    Question,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptRequest {
    pub shape: PromptShape,
    pub payload: String,
    pub format_name: String,
}

impl PromptRequest {
    pub fn new(shape: PromptShape, payload: impl Into<String>) -> Result<Self, LlmError> {
        let payload = payload.into();
        if payload.trim().is_empty() {
            return Err(LlmError::EmptyPayload);
        }
        Ok(Self { shape, payload, format_name: DEFAULT_FORMAT.to_owned() })
    }

    pub fn with_format(mut self, format: impl Into<String>) -> Self {
        self.format_name = format.into();
        self
    }
}

pub fn build_prompt(params: &PromptRequest) -> String {
    let (payload, format) = (&params.payload, &params.format_name);
    match params.shape {
        PromptShape::Entity => format!("Give me facts about entity {payload} using RDF N-triples and {format} format"),
        PromptShape::Text => format!("Give me facts using RDF N-triples and {format} format for the text: {payload}"),
        PromptShape::Question => {
            format!("Give me facts using RDF N-triples and {format} format about the question: {payload}")
        }
    }
}

/// The entity prompt used when the benchmark was collected.
pub fn build_benchmark_prompt(entity: &str) -> String {
    format!("Give me facts in RDF N-Triples format for entity {entity} using DBpedia format")
}

/// Hex SHA-256 of the prompt bytes.
pub fn fixture_key(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

pub fn fixture_path(dir: &Path, prompt: &str) -> PathBuf {
    dir.join(format!("{}.txt", fixture_key(prompt)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LlmMode {
    Replay,
    Http,
}

#[derive(Debug, Clone)]
pub struct LlmClientConfig {
    pub mode: LlmMode,
    pub fixtures_dir: PathBuf,
    pub base_url: String,
    pub model: String,
    pub api_key_env: String,
    pub timeout: Duration,
    pub rate_limit: f64,
}

impl LlmClientConfig {
    pub fn replay(fixtures_dir: impl Into<PathBuf>) -> Self {
        Self {
            mode: LlmMode::Replay,
            fixtures_dir: fixtures_dir.into(),
            base_url: DEFAULT_BASE_URL.to_owned(),
            model: DEFAULT_MODEL.to_owned(),
            api_key_env: DEFAULT_KEY_ENV.to_owned(),
            timeout: Duration::from_secs(60),
            rate_limit: DEFAULT_RATE_LIMIT,
        }
    }

    pub fn http(base_url: impl Into<String>) -> Self {
        Self { mode: LlmMode::Http, base_url: base_url.into(), ..Self::replay(PathBuf::new()) }
    }
}

/// Fetches responses for prompts according to its configuration.
#[derive(Debug)]
pub struct LlmClient {
    cfg: LlmClientConfig,
    http: Option<HttpClient>,
}

impl LlmClient {
    pub fn new(cfg: LlmClientConfig) -> Result<Self, LlmError> {
        let http = match cfg.mode {
            LlmMode::Replay => {
                if !cfg.fixtures_dir.is_dir() {
                    return Err(LlmError::FixturesDir(cfg.fixtures_dir.clone()));
                }
                None
            }
            LlmMode::Http => {
                if !(cfg.rate_limit > 0.0 && cfg.rate_limit.is_finite()) || cfg.timeout.is_zero() {
                    return Err(RemoteError::Config("LLM rate limit and timeout must be positive".into()).into());
                }
                Some(HttpClient::new(
                    cfg.timeout,
                    cfg.rate_limit,
                    RetryPolicy { max_retries: DEFAULT_MAX_RETRIES, backoff: Duration::from_millis(500) },
                ))
            }
        };
        Ok(Self { cfg, http })
    }

    pub fn config(&self) -> &LlmClientConfig {
        &self.cfg
    }

    pub fn fetch_response(&self, prompt: &str) -> Result<String, LlmError> {
        match &self.http {
            None => {
                let path = fixture_path(&self.cfg.fixtures_dir, prompt);
                match std::fs::read(&path) {
                    Ok(bytes) => Ok(String::from_utf8_lossy(&bytes).into_owned()),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                        Err(LlmError::NoFixture { hash: fixture_key(prompt), path })
                    }
                    Err(source) => Err(LlmError::Io { path, source }),
                }
            }
            Some(http) => {
                let key = std::env::var(&self.cfg.api_key_env)
                    .ok()
                    .filter(|k| !k.is_empty())
                    .ok_or_else(|| LlmError::MissingKey(self.cfg.api_key_env.clone()))?;
                let url = format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'));
                let body = json!({
                    "model": self.cfg.model,
                    "messages": [{"role": "user", "content": prompt}],
                });
                let body = body.to_string();
                let text = http.execute(&url, |agent| {
                    agent
                        .post(&url)
                        .set("Authorization", &format!("Bearer {key}"))
                        .set("Content-Type", "application/json")
                        .send_string(&body)
                })?;
                let envelope: Value = serde_json::from_str(&text).map_err(|_| LlmError::Envelope)?;
                envelope
                    .pointer("/choices/0/message/content")
                    .and_then(Value::as_str)
                    .map(str::to_owned)
                    .ok_or(LlmError::Envelope)
            }
        }
    }
}

/// Strips code fences and leading list markers, keeping line numbers, then
/// parses what remains.
pub fn extract_facts(response: &str, prefixes: &PrefixMap) -> ParseReport {
    let mut cleaned = String::with_capacity(response.len());
    for line in response.lines() {
        let trimmed = line.trim();
        if !trimmed.starts_with("```") {
            cleaned.push_str(strip_list_marker(trimmed));
        }
        // one terminator per input line keeps a trailing blank line countable
        cleaned.push('\n');
    }
    parse_triples(&cleaned, prefixes)
}

fn strip_list_marker(line: &str) -> &str {
    for bullet in ["- ", "* ", "\u{2022} "] {
        if let Some(rest) = line.strip_prefix(bullet) {
            return rest.trim_start();
        }
    }
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(rest) = rest.strip_prefix(". ").or_else(|| rest.strip_prefix(") ")) {
            return rest.trim_start();
        }
    }
    line
}
