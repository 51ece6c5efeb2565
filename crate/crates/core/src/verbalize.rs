//! Turns triples into short sentences for the sentence encoder.
//!
//! IRIs are reduced to their local name, underscores become spaces and
//! camelCase words are split at lower-to-upper boundaries. Opaque local
//! names (Wikidata-style `Q868`, `P569`) are replaced by an `rdfs:label`
//! when a label source knows one.

use percent_encoding::percent_decode_str;
use regex::Regex;
use serde::Serialize;

use crate::rdf::{Iri, Term, Triple};
use crate::store::KnowledgeGraph;

pub const DEFAULT_OPAQUE_PATTERN: &str = r"^[A-Za-z]{0,2}[0-9]+$";

/// Anything that can resolve an IRI to a human-readable label.
pub trait LabelSource {
    fn label(&self, iri: &Iri) -> Option<String>;
}

impl LabelSource for KnowledgeGraph {
    fn label(&self, iri: &Iri) -> Option<String> {
        self.label_of(iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Substitution {
    pub term: Term,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerbalizedTriple {
    pub original: Triple,
    pub sentence: String,
    pub substitutions: Vec<Substitution>,
}

#[derive(Debug, Clone)]
pub struct Verbalizer {
    opaque: Regex,
}

impl Default for Verbalizer {
    fn default() -> Self {
        Self::new(DEFAULT_OPAQUE_PATTERN).expect("default pattern compiles")
    }
}

impl Verbalizer {
    pub fn new(opaque_pattern: &str) -> Result<Self, regex::Error> {
        Ok(Self { opaque: Regex::new(opaque_pattern)? })
    }

    pub fn convert_term(&self, term: &Term, labels: Option<&dyn LabelSource>) -> String {
        self.render(term, labels).0
    }

    fn render(&self, term: &Term, labels: Option<&dyn LabelSource>) -> (String, Option<Substitution>) {
        match term {
            Term::Iri { value } => {
                let local = local_name(value.as_str());
                if self.opaque.is_match(local) {
                    if let Some(label) = labels.and_then(|src| src.label(value)) {
                        let text = collapse_whitespace(&label);
                        let sub = Substitution { term: term.clone(), label: label.clone() };
                        return (text, Some(sub));
                    }
                    return (local.to_owned(), None);
                }
                let decoded = percent_decode_str(local).decode_utf8_lossy();
                (humanize(&decoded), None)
            }
            Term::Literal(lit) => {
                let lexical = lit.lexical();
                let unquoted = lexical.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(lexical);
                (collapse_whitespace(unquoted), None)
            }
            Term::Blank { label } => (humanize(label), None),
        }
    }

    pub fn convert_triple(&self, triple: &Triple, labels: Option<&dyn LabelSource>) -> VerbalizedTriple {
        let mut substitutions = Vec::new();
        let parts: Vec<String> = [triple.subject(), triple.predicate(), triple.object()]
            .into_iter()
            .map(|t| {
                let (text, sub) = self.render(t, labels);
                substitutions.extend(sub);
                text
            })
            .collect();
        VerbalizedTriple { original: triple.clone(), sentence: collapse_whitespace(&parts.join(" ")), substitutions }
    }
}

/// Substring after the last `/` or `#` (after the last `:` when neither
/// occurs), ignoring trailing separators.
fn local_name(iri: &str) -> &str {
    let trimmed = iri.trim_end_matches(['/', '#']);
    let cut = trimmed.rfind(['/', '#']).or_else(|| trimmed.rfind(':')).map_or(0, |i| i + 1);
    &trimmed[cut..]
}

fn humanize(local: &str) -> String {
    let mut out = String::with_capacity(local.len() + 4);
    let mut prev: Option<char> = None;
    for c in local.chars() {
        let c = if c == '_' { ' ' } else { c };
        if let Some(p) = prev {
            if p.is_lowercase() && c.is_uppercase() {
                out.push(' ');
            }
        }
        out.push(c);
        prev = Some(c);
    }
    collapse_whitespace(&out)
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
