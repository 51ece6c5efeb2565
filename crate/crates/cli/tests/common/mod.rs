#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().expect("repo root")
}

pub fn data(name: &str) -> String {
    repo_root().join("data").join(name).display().to_string()
}

/// Runs the binary from the repository root so relative defaults resolve.
pub fn kgvalid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgvalid"))
        .args(args)
        .current_dir(repo_root())
        .env_remove("RUST_LOG")
        .output()
        .expect("run kgvalid")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

pub fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", stdout(out)))
}

pub fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = repo_root().join("schema").join(name);
    let text = std::fs::read_to_string(&path).expect("schema file");
    let value: Value = serde_json::from_str(&text).expect("schema JSON");
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

pub fn assert_schema(name: &str, doc: &Value) {
    let compiled = schema(name);
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name}: {}", msgs.join("; "));
}

/// Writes the seeded synthetic suite into `dir`; returns (manifest, benchmark).
pub fn write_suite(dir: &Path, seed: u64) -> (String, String, [usize; 4]) {
    let suite = kgvalid_testkit::gen::synthetic_suite(seed);
    let mut manifest = String::new();
    for (source, text) in &suite.files {
        std::fs::write(dir.join(format!("{source}.nt")), text).unwrap();
        manifest.push_str(&format!("{source}={source}.nt\n"));
    }
    let m = dir.join("kg.manifest");
    std::fs::write(&m, manifest).unwrap();
    let b = dir.join("benchmark.jsonl");
    std::fs::write(&b, &suite.benchmark).unwrap();
    (m.display().to_string(), b.display().to_string(), suite.expected)
}
