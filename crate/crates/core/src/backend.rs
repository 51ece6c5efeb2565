//! The query surface the validator needs from a knowledge graph, with a
//! local in-memory implementation and two remote ones.

use std::sync::Mutex;

use thiserror::Error;

use crate::rdf::{Term, Triple};
use crate::remote::{FactServiceClient, RemoteError, SparqlClient};
use crate::store::{KnowledgeGraph, PairKind, ProvenancedTriple, StoreError};
use crate::verbalize::LabelSource;

/// Rule-C candidates, possibly cut at a configured cap.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateBatch {
    pub triples: Vec<ProvenancedTriple>,
    pub truncated: bool,
}

impl CandidateBatch {
    pub fn complete(triples: Vec<ProvenancedTriple>) -> Self {
        Self { triples, truncated: false }
    }

    /// Keeps the first `cap` triples and flags whether anything was dropped.
    pub fn capped(mut triples: Vec<ProvenancedTriple>, cap: usize) -> Self {
        let truncated = triples.len() > cap;
        triples.truncate(cap);
        Self { triples, truncated }
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Remote(#[from] RemoteError),
}

impl BackendError {
    pub fn is_transport(&self) -> bool {
        matches!(self, Self::Remote(e) if e.is_transport())
    }
}

/// A knowledge graph that can answer the three candidate rules.
pub trait Backend: Send + Sync {
    /// Name echoed in validation results.
    fn name(&self) -> &str;

    /// Rule A: a stored triple equivalent to `fact`, if any.
    fn equivalent_triple(&self, fact: &Triple) -> Result<Option<ProvenancedTriple>, BackendError>;

    /// Rule B: triples about the fact's subject sharing its predicate or its
    /// object, deduplicated, in canonical order.
    fn pair_candidates(&self, fact: &Triple) -> Result<Vec<(ProvenancedTriple, PairKind)>, BackendError>;

    /// Rule C: every triple with `e` as subject or object.
    fn entity_triples(&self, e: &Term) -> Result<CandidateBatch, BackendError>;

    /// Label lookup for opaque identifiers during verbalization.
    fn labels(&self) -> Option<&dyn LabelSource> {
        None
    }
}

/// In-memory backend over a loaded [`KnowledgeGraph`], closure-aware.
#[derive(Debug)]
pub struct LocalBackend {
    kg: KnowledgeGraph,
    name: String,
    cap: Option<usize>,
}

impl LocalBackend {
    pub fn new(kg: KnowledgeGraph) -> Self {
        Self { kg, name: "local".to_owned(), cap: None }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn kg(&self) -> &KnowledgeGraph {
        &self.kg
    }
}

impl Backend for LocalBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn equivalent_triple(&self, fact: &Triple) -> Result<Option<ProvenancedTriple>, BackendError> {
        Ok(self.kg.find_equivalent(fact)?.cloned())
    }

    fn pair_candidates(&self, fact: &Triple) -> Result<Vec<(ProvenancedTriple, PairKind)>, BackendError> {
        Ok(self
            .kg
            .sp_so_candidates(fact.subject(), fact.predicate(), fact.object())?
            .into_iter()
            .map(|(t, kind)| (t.clone(), kind))
            .collect())
    }

    fn entity_triples(&self, e: &Term) -> Result<CandidateBatch, BackendError> {
        let all: Vec<ProvenancedTriple> = self.kg.triples_of_entity(e)?.into_iter().cloned().collect();
        Ok(match self.cap {
            Some(cap) => CandidateBatch::capped(all, cap),
            None => CandidateBatch::complete(all),
        })
    }

    fn labels(&self) -> Option<&dyn LabelSource> {
        Some(&self.kg)
    }
}

fn require_iri(e: &Term) -> Result<(), BackendError> {
    if e.is_iri() {
        Ok(())
    } else {
        Err(StoreError::NotAnIri(e.clone()).into())
    }
}

/// SPARQL endpoint backend. No closure is applied locally: rule A is an
/// exact ASK and rule B queries the predicate and object verbatim.
#[derive(Debug)]
pub struct SparqlBackend {
    client: SparqlClient,
}

impl SparqlBackend {
    pub fn new(client: SparqlClient) -> Self {
        Self { client }
    }

    pub fn client(&self) -> &SparqlClient {
        &self.client
    }
}

impl Backend for SparqlBackend {
    fn name(&self) -> &str {
        &self.client.config().name
    }

    fn equivalent_triple(&self, fact: &Triple) -> Result<Option<ProvenancedTriple>, BackendError> {
        require_iri(fact.subject())?;
        // a blank object would become an existential variable
        if fact.object().is_blank() || !self.client.ask_equivalent(fact)? {
            return Ok(None);
        }
        Ok(Some(ProvenancedTriple::new(fact.clone(), self.name())))
    }

    fn pair_candidates(&self, fact: &Triple) -> Result<Vec<(ProvenancedTriple, PairKind)>, BackendError> {
        require_iri(fact.subject())?;
        let mut out: Vec<(ProvenancedTriple, PairKind)> = self
            .client
            .select_sp(fact.subject(), fact.predicate())?
            .into_iter()
            .map(|t| (t, PairKind::SamePredicate))
            .collect();
        if !fact.object().is_blank() {
            out.extend(
                self.client.select_so(fact.subject(), fact.object())?.into_iter().map(|t| (t, PairKind::SameObject)),
            );
        }
        Ok(dedup_pairs(out))
    }

    fn entity_triples(&self, e: &Term) -> Result<CandidateBatch, BackendError> {
        require_iri(e)?;
        Ok(self.client.select_all(e)?)
    }
}

/// Fact-service backend. The service only exposes `allFacts`, so all three
/// rules filter that one response.
#[derive(Debug)]
pub struct FactServiceBackend {
    client: FactServiceClient,
    last: Mutex<Option<(Term, CandidateBatch)>>,
}

impl FactServiceBackend {
    pub fn new(client: FactServiceClient) -> Self {
        Self { client, last: Mutex::new(None) }
    }

    pub fn client(&self) -> &FactServiceClient {
        &self.client
    }

    /// `allFacts` for `e`, reusing the previous response for the same entity.
    fn facts(&self, e: &Term) -> Result<CandidateBatch, BackendError> {
        require_iri(e)?;
        if let Some((cached, batch)) = self.last.lock().unwrap_or_else(|p| p.into_inner()).as_ref() {
            if cached == e {
                return Ok(batch.clone());
            }
        }
        let batch = self.client.select_all(e)?;
        *self.last.lock().unwrap_or_else(|p| p.into_inner()) = Some((e.clone(), batch.clone()));
        Ok(batch)
    }
}

impl Backend for FactServiceBackend {
    fn name(&self) -> &str {
        &self.client.config().name
    }

    fn equivalent_triple(&self, fact: &Triple) -> Result<Option<ProvenancedTriple>, BackendError> {
        let object = fact.object().lexical_key();
        Ok(self.facts(fact.subject())?.triples.into_iter().find(|t| {
            t.triple.subject() == fact.subject()
                && t.triple.predicate() == fact.predicate()
                && t.triple.object().lexical_key() == object
        }))
    }

    fn pair_candidates(&self, fact: &Triple) -> Result<Vec<(ProvenancedTriple, PairKind)>, BackendError> {
        let object = fact.object().lexical_key();
        let out = self
            .facts(fact.subject())?
            .triples
            .into_iter()
            .filter(|t| t.triple.subject() == fact.subject())
            .filter_map(|t| {
                if t.triple.predicate() == fact.predicate() {
                    Some((t, PairKind::SamePredicate))
                } else if t.triple.object().lexical_key() == object {
                    Some((t, PairKind::SameObject))
                } else {
                    None
                }
            })
            .collect();
        Ok(dedup_pairs(out))
    }

    fn entity_triples(&self, e: &Term) -> Result<CandidateBatch, BackendError> {
        self.facts(e)
    }
}

/// One entry per (subject, predicate, lexical object); same-predicate wins
/// over same-object and the smallest source is kept. Output is in canonical
/// order.
fn dedup_pairs(pairs: Vec<(ProvenancedTriple, PairKind)>) -> Vec<(ProvenancedTriple, PairKind)> {
    type Keyed = ((Term, Term, Term), String, (ProvenancedTriple, PairKind));
    let mut keyed: Vec<Keyed> = pairs
        .into_iter()
        .map(|(t, kind)| {
            let key = (t.triple.subject().clone(), t.triple.predicate().clone(), t.triple.object().lexical_key());
            (key, t.triple.canonical(), (t, kind))
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.1.cmp(&b.1).then_with(|| (a.2).1.cmp(&(b.2).1)).then_with(|| (a.2).0.source.cmp(&(b.2).0.source))
    });
    let mut seen = std::collections::HashSet::new();
    keyed.into_iter().filter(|(key, _, _)| seen.insert(key.clone())).map(|(_, _, pair)| pair).collect()
}
