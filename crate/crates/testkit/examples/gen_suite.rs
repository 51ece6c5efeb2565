//! Writes the seeded synthetic suite and the proportioned stats file to a directory.
//!
//! Usage: `cargo run -p kgvalid-testkit --example gen_suite -- <dir> [seed]`

use std::path::PathBuf;

use kgvalid_testkit::gen::{proportioned_benchmark, synthetic_suite};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic".into()));
    let seed = args.next().map_or(42, |s| s.parse().expect("seed must be an integer"));
    std::fs::create_dir_all(&dir)?;
    let suite = synthetic_suite(seed);
    let mut manifest = String::new();
    for (source, text) in &suite.files {
        std::fs::write(dir.join(format!("{source}.nt")), text)?;
        manifest.push_str(&format!("{source}={source}.nt\n"));
    }
    std::fs::write(dir.join("kg.manifest"), manifest)?;
    std::fs::write(dir.join("benchmark.jsonl"), &suite.benchmark)?;
    std::fs::write(dir.join("proportioned.jsonl"), proportioned_benchmark())?;
    println!("expected C1..C4: {:?}", suite.expected);
    Ok(())
}
