use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::equivalence::EquivalenceIndex;
use crate::rdf::prefix::RDFS_LABEL;
use crate::rdf::{parse_triples, Diagnostic, Iri, PrefixMap, Term, Triple};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `name=path`")]
    Manifest { path: String, line: usize },
    #[error("entity must be an IRI, got {0}")]
    NotAnIri(Term),
}

/// A triple tagged with the graph it was loaded from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProvenancedTriple {
    pub triple: Triple,
    pub source: String,
}

impl ProvenancedTriple {
    pub fn new(triple: Triple, source: impl Into<String>) -> Self {
        let source = source.into();
        debug_assert!(!source.is_empty(), "source graph name must be non-empty");
        Self { triple, source }
    }

    /// Ordering used everywhere results are listed: canonical line, then source.
    pub fn sort_key(&self) -> (String, &str) {
        (self.triple.canonical(), self.source.as_str())
    }
}

/// How a rule-B candidate relates to the fact it was retrieved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    SamePredicate,
    SameObject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadDiagnostic {
    pub source: String,
    #[serde(flatten)]
    pub diagnostic: Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct TripleKey {
    subject: Term,
    predicate: Term,
    object: Term,
}

/// Immutable in-memory graph with subject and object indexes keyed by
/// equivalence-class representative.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    triples: Vec<ProvenancedTriple>,
    keys: Vec<TripleKey>,
    subject_index: HashMap<Term, Vec<usize>>,
    object_index: HashMap<Term, Vec<usize>>,
    mentioned: HashSet<Iri>,
    equivalence: EquivalenceIndex,
    diagnostics: Vec<LoadDiagnostic>,
}

impl KnowledgeGraph {
    pub fn from_triples(triples: impl IntoIterator<Item = ProvenancedTriple>) -> Self {
        let mut decorated: Vec<(String, ProvenancedTriple)> =
            triples.into_iter().map(|t| (t.triple.canonical(), t)).collect();
        decorated.sort_by(|(ca, a), (cb, b)| ca.cmp(cb).then_with(|| a.source.cmp(&b.source)));
        decorated.dedup_by(|(ca, a), (cb, b)| ca == cb && a.source == b.source);
        let triples: Vec<ProvenancedTriple> = decorated.into_iter().map(|(_, t)| t).collect();

        let equivalence = EquivalenceIndex::from_triples(triples.iter().map(|t| &t.triple));
        let mut keys = Vec::with_capacity(triples.len());
        let mut subject_index: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut object_index: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut mentioned = HashSet::new();
        for (idx, pt) in triples.iter().enumerate() {
            let t = &pt.triple;
            let key = TripleKey {
                subject: equivalence.node_key(t.subject()),
                predicate: equivalence.predicate_key(t.predicate()),
                object: equivalence.node_key(t.object()),
            };
            subject_index.entry(key.subject.clone()).or_default().push(idx);
            if key.object != key.subject {
                object_index.entry(key.object.clone()).or_default().push(idx);
            } else {
                // self-loop: listed once through the subject index
                object_index.entry(key.object.clone()).or_default();
            }
            for term in [t.subject(), t.predicate(), t.object()] {
                if let Some(iri) = term.as_iri() {
                    mentioned.insert(iri.clone());
                }
            }
            keys.push(key);
        }
        Self { triples, keys, subject_index, object_index, mentioned, equivalence, diagnostics: Vec::new() }
    }

    /// Loads N-Triples files, tagging each triple with its file's source name.
    pub fn load(files: &[(PathBuf, String)], prefixes: &PrefixMap) -> Result<Self, StoreError> {
        let mut all = Vec::new();
        let mut diagnostics = Vec::new();
        for (path, source) in files {
            let text = std::fs::read_to_string(path)
                .map_err(|e| StoreError::Io { path: path.display().to_string(), source: e })?;
            let report = parse_triples(&text, prefixes);
            diagnostics.extend(
                report.diagnostics.into_iter().map(|d| LoadDiagnostic { source: source.clone(), diagnostic: d }),
            );
            all.extend(report.triples.into_iter().map(|t| ProvenancedTriple::new(t, source.clone())));
        }
        let mut kg = Self::from_triples(all);
        for message in kg.equivalence.diagnostics().to_vec() {
            log::warn!("{message}");
        }
        kg.diagnostics = diagnostics;
        Ok(kg)
    }

    pub fn diagnostics(&self) -> &[LoadDiagnostic] {
        &self.diagnostics
    }

    pub fn equivalence(&self) -> &EquivalenceIndex {
        &self.equivalence
    }

    pub fn triples(&self) -> &[ProvenancedTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn sources(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.triples.iter().map(|t| t.source.as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn entity_key(&self, e: &Term) -> Result<Term, StoreError> {
        if !e.is_iri() {
            return Err(StoreError::NotAnIri(e.clone()));
        }
        Ok(self.equivalence.node_key(e))
    }

    fn subject_hits(&self, key: &Term) -> &[usize] {
        self.subject_index.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All triples whose subject or object is equivalent to `e`, in canonical order.
    pub fn triples_of_entity(&self, e: &Term) -> Result<Vec<&ProvenancedTriple>, StoreError> {
        let key = self.entity_key(e)?;
        let subj = self.subject_hits(&key);
        let obj = self.object_index.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        let mut merged = Vec::with_capacity(subj.len() + obj.len());
        let (mut i, mut j) = (0, 0);
        while i < subj.len() || j < obj.len() {
            let next = match (subj.get(i), obj.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            merged.push(&self.triples[next]);
        }
        Ok(merged)
    }

    /// The first stored triple equivalent to `t` in every position (literals
    /// by lexical form), if any.
    pub fn find_equivalent(&self, t: &Triple) -> Result<Option<&ProvenancedTriple>, StoreError> {
        let subject = self.entity_key(t.subject())?;
        let predicate = self.equivalence.predicate_key(t.predicate());
        let object = self.equivalence.node_key(t.object());
        Ok(self
            .subject_hits(&subject)
            .iter()
            .find(|&&idx| self.keys[idx].predicate == predicate && self.keys[idx].object == object)
            .map(|&idx| &self.triples[idx]))
    }

    /// Triples about `e` sharing the predicate or the object of the query,
    /// one per equivalence-canonical triple.
    pub fn sp_so_candidates(
        &self,
        e: &Term,
        p: &Term,
        o: &Term,
    ) -> Result<Vec<(&ProvenancedTriple, PairKind)>, StoreError> {
        let subject = self.entity_key(e)?;
        let predicate = self.equivalence.predicate_key(p);
        let object = self.equivalence.node_key(o);
        let mut seen: HashSet<&TripleKey> = HashSet::new();
        let mut out = Vec::new();
        for &idx in self.subject_hits(&subject) {
            let key = &self.keys[idx];
            let kind = if key.predicate == predicate {
                PairKind::SamePredicate
            } else if key.object == object {
                PairKind::SameObject
            } else {
                continue;
            };
            if seen.insert(key) {
                out.push((&self.triples[idx], kind));
            }
        }
        Ok(out)
    }

    /// Smallest `rdfs:label` among the entity's equivalence class.
    pub fn label_of(&self, iri: &Iri) -> Option<String> {
        let key = self.equivalence.node_key(&Term::from(iri.clone()));
        self.subject_hits(&key)
            .iter()
            .map(|&idx| &self.triples[idx].triple)
            .filter(|t| t.predicate().as_iri().map(Iri::as_str) == Some(RDFS_LABEL))
            .filter_map(|t| t.object().as_literal().map(|l| l.lexical().to_owned()))
            .min()
    }

    /// Whether any triple mentions `iri` in any position.
    pub fn mentions(&self, iri: &Iri) -> bool {
        self.mentioned.contains(iri)
    }
}

/// Reads a manifest of `name=path` lines; relative paths resolve against the
/// manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, String)>, StoreError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| StoreError::Io { path: path.display().to_string(), source: e })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, file) = line
            .split_once('=')
            .filter(|(n, f)| !n.trim().is_empty() && !f.trim().is_empty())
            .ok_or_else(|| StoreError::Manifest { path: path.display().to_string(), line: idx + 1 })?;
        out.push((base.join(file.trim()), name.trim().to_owned()));
    }
    Ok(out)
}

/// Source-graph name for a file: its stem.
pub fn default_source_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "graph".to_owned())
}
