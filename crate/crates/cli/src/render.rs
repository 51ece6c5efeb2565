//! JSON and text renderings of validation outcomes. Both carry the same
//! facts, rules and scores; scores print with shortest round-trip digits.

use std::fmt::Write as _;

use kgvalid_core::validator::Via;
use kgvalid_core::{serialize_triple, EncoderHandle, PrefixMap, Triple, ValidationResult};
use serde_json::{json, Value};

/// One input fact and what became of it.
pub struct FactOutcome {
    pub input: String,
    pub result: Result<ValidationResult, String>,
}

pub fn via_name(via: Via) -> &'static str {
    match via {
        Via::Equivalent => "equivalent",
        Via::SamePredicate => "same-predicate",
        Via::SameObject => "same-object",
        Via::Entity => "entity",
    }
}

pub fn triple_json(t: &Triple, prefixes: &PrefixMap) -> Value {
    json!({
        "subject": t.subject().to_string(),
        "predicate": t.predicate().to_string(),
        "object": t.object().to_string(),
        "ntriples": t.canonical(),
        "compact": serialize_triple(t, Some(prefixes)),
    })
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

pub fn result_json(r: &ValidationResult, prefixes: &PrefixMap, timings: bool) -> Value {
    let matches: Vec<Value> = r
        .matches
        .iter()
        .enumerate()
        .map(|(i, m)| {
            json!({
                "rank": i + 1,
                "triple": triple_json(&m.triple.triple, prefixes),
                "source": m.triple.source,
                "via": via_name(m.via),
                "score": m.score,
                "sentence": m.sentence,
            })
        })
        .collect();
    let mut v = json!({
        "fact": triple_json(&r.fact, prefixes),
        "sentence": r.fact_sentence,
        "rule": r.rule.to_string(),
        "candidates": r.candidate_count,
        "truncated": r.truncated,
        "backend": r.backend,
        "matches": matches,
    });
    if timings {
        v["timings_ms"] = json!({
            "candidate_retrieval": ms(r.timings.candidate_retrieval),
            "encoding": ms(r.timings.encoding),
            "ranking": ms(r.timings.ranking),
            "total": ms(r.timings.total()),
        });
    }
    v
}

pub fn config_json(backend: &str, enc: &EncoderHandle, k: usize) -> Value {
    json!({
        "backend": backend,
        "encoder": enc.kind(),
        "encoder_model": enc.model_name(),
        "dimension": enc.dimension(),
        "k": k,
    })
}

pub fn outcomes_json(config: Value, outcomes: &[FactOutcome], prefixes: &PrefixMap, timings: bool) -> Value {
    let results: Vec<Value> = outcomes
        .iter()
        .map(|o| match &o.result {
            Ok(r) => json!({"input": o.input, "status": "ok", "result": result_json(r, prefixes, timings)}),
            Err(e) => json!({"input": o.input, "status": "error", "error": e}),
        })
        .collect();
    let errors = outcomes.iter().filter(|o| o.result.is_err()).count();
    json!({
        "config": config,
        "results": results,
        "summary": {"facts": outcomes.len(), "ok": outcomes.len() - errors, "errors": errors},
    })
}

pub fn outcomes_text(outcomes: &[FactOutcome], prefixes: &PrefixMap, timings: bool) -> String {
    let mut out = String::new();
    for (i, o) in outcomes.iter().enumerate() {
        let _ = writeln!(out, "fact {}: {}", i + 1, o.input);
        match &o.result {
            Err(e) => {
                let _ = writeln!(out, "  error: {e}");
            }
            Ok(r) => {
                let _ = writeln!(out, "  triple: {}", r.fact.canonical());
                let _ = writeln!(out, "  sentence: {}", r.fact_sentence);
                let _ = writeln!(
                    out,
                    "  rule: {} ({} candidate{}{})",
                    r.rule,
                    r.candidate_count,
                    if r.candidate_count == 1 { "" } else { "s" },
                    if r.truncated { ", truncated" } else { "" }
                );
                if r.matches.is_empty() {
                    let _ = writeln!(out, "  no matches");
                }
                for (rank, m) in r.matches.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  #{} score {} [{}] via {}",
                        rank + 1,
                        m.score,
                        m.triple.source,
                        via_name(m.via)
                    );
                    let _ = writeln!(out, "     triple: {}", serialize_triple(&m.triple.triple, Some(prefixes)));
                    let _ = writeln!(out, "     sentence: {}", m.sentence);
                }
                if timings {
                    let t = r.timings;
                    let _ = writeln!(
                        out,
                        "  timings: retrieval {:.3} ms, encoding {:.3} ms, ranking {:.3} ms",
                        ms(t.candidate_retrieval),
                        ms(t.encoding),
                        ms(t.ranking)
                    );
                }
            }
        }
    }
    let errors = outcomes.iter().filter(|o| o.result.is_err()).count();
    let _ = writeln!(out, "{} fact(s), {} error(s)", outcomes.len(), errors);
    out
}
