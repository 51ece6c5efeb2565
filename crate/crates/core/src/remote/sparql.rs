//! SPARQL 1.1 Protocol client (URL-encoded POST, JSON results).

use std::collections::HashMap;

use serde::Deserialize;

use super::config::{EndpointConfig, EndpointKind};
use super::http::{HttpClient, RetryPolicy};
use super::{dedup_sorted, CandidateBatch, RemoteError};
use crate::rdf::{Iri, Literal, Term, Triple};
use crate::store::ProvenancedTriple;

pub const RESULTS_JSON: &str = "application/sparql-results+json";

#[derive(Debug, Deserialize)]
struct ResultsDocument {
    #[serde(default)]
    boolean: Option<bool>,
    #[serde(default)]
    results: Option<ResultBindings>,
}

#[derive(Debug, Deserialize)]
struct ResultBindings {
    bindings: Vec<HashMap<String, JsonTerm>>,
}

#[derive(Debug, Deserialize)]
struct JsonTerm {
    #[serde(rename = "type")]
    kind: String,
    value: String,
    #[serde(default)]
    datatype: Option<String>,
    #[serde(default, rename = "xml:lang")]
    lang: Option<String>,
}

impl JsonTerm {
    fn into_term(self) -> Result<Term, String> {
        match self.kind.as_str() {
            "uri" => Term::iri(self.value).map_err(|e| e.to_string()),
            "literal" | "typed-literal" => {
                let lit = match (self.lang, self.datatype) {
                    (Some(lang), _) => Literal::lang(self.value, lang).map_err(|e| e.to_string())?,
                    (None, Some(dt)) => Literal::typed(self.value, Iri::new(dt).map_err(|e| e.to_string())?),
                    (None, None) => Literal::plain(self.value),
                };
                Ok(Term::Literal(lit))
            }
            "bnode" => {
                let label: String =
                    self.value.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
                Term::blank(if label.is_empty() { "b".to_owned() } else { label }).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown binding type {other:?}")),
        }
    }
}

/// Renders a term for a query pattern. Literals are sent as their quoted
/// lexical form only; blank nodes become an anonymous variable.
pub fn query_term(term: &Term) -> String {
    match term {
        Term::Iri { value } => value.to_string(),
        Term::Literal(lit) => Term::literal(lit.lexical()).to_string(),
        Term::Blank { .. } => "?anon".to_owned(),
    }
}

pub fn ask_triple_query(t: &Triple) -> String {
    format!("ASK {{ {} {} {} }}", query_term(t.subject()), query_term(t.predicate()), query_term(t.object()))
}

pub fn select_sp_query(e: &Term, p: &Term, limit: usize) -> String {
    format!("SELECT ?o WHERE {{ {} {} ?o }} LIMIT {limit}", query_term(e), query_term(p))
}

pub fn select_so_query(e: &Term, o: &Term, limit: usize) -> String {
    format!("SELECT ?p WHERE {{ {} ?p {} }} LIMIT {limit}", query_term(e), query_term(o))
}

pub fn select_outgoing_query(e: &Term, limit: usize) -> String {
    format!("SELECT ?p ?o WHERE {{ {} ?p ?o }} LIMIT {limit}", query_term(e))
}

pub fn select_incoming_query(e: &Term, limit: usize) -> String {
    format!("SELECT ?s ?p WHERE {{ ?s ?p {} }} LIMIT {limit}", query_term(e))
}

pub fn dereferencable_query(uri: &Iri) -> String {
    format!("ASK {{ {{ {uri} ?p ?o }} UNION {{ ?s {uri} ?o }} UNION {{ ?s ?p {uri} }} }}")
}

#[derive(Debug)]
pub struct SparqlClient {
    cfg: EndpointConfig,
    http: HttpClient,
}

impl SparqlClient {
    pub fn new(cfg: EndpointConfig) -> Result<Self, RemoteError> {
        cfg.validate()?;
        if cfg.kind != EndpointKind::Sparql {
            return Err(RemoteError::Config(format!("{} is not a SPARQL endpoint", cfg.name)));
        }
        let http = HttpClient::new(
            cfg.timeout,
            cfg.rate_limit,
            RetryPolicy { max_retries: cfg.max_retries, backoff: cfg.retry_backoff },
        );
        Ok(Self { cfg, http })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.cfg
    }

    pub fn http(&self) -> &HttpClient {
        &self.http
    }

    fn run(&self, query: &str) -> Result<ResultsDocument, RemoteError> {
        log::debug!("sparql {}: {query}", self.cfg.name);
        let url = self.cfg.base_url.as_str();
        let body = self
            .http
            .execute(url, |agent| agent.post(url).set("Accept", RESULTS_JSON).send_form(&[("query", query)]))?;
        serde_json::from_str(&body).map_err(|e| RemoteError::Protocol {
            url: url.to_owned(),
            message: format!("malformed SPARQL JSON results: {e}"),
        })
    }

    pub fn ask(&self, query: &str) -> Result<bool, RemoteError> {
        self.run(query)?.boolean.ok_or_else(|| RemoteError::Protocol {
            url: self.cfg.base_url.to_string(),
            message: "ASK response has no boolean".to_owned(),
        })
    }

    pub fn select(&self, query: &str) -> Result<Vec<HashMap<String, Term>>, RemoteError> {
        let doc = self.run(query)?;
        let protocol = |message: String| RemoteError::Protocol { url: self.cfg.base_url.to_string(), message };
        let results = doc.results.ok_or_else(|| protocol("SELECT response has no results".to_owned()))?;
        results
            .bindings
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|(var, t)| t.into_term().map(|t| (var, t)))
                    .collect::<Result<HashMap<_, _>, _>>()
                    .map_err(protocol)
            })
            .collect()
    }

    fn triples_from(
        &self,
        rows: Vec<HashMap<String, Term>>,
        build: impl Fn(&HashMap<String, Term>) -> Option<(Term, Term, Term)>,
    ) -> Result<Vec<ProvenancedTriple>, RemoteError> {
        let mut out = Vec::with_capacity(rows.len());
        for row in &rows {
            let Some((s, p, o)) = build(row) else {
                return Err(RemoteError::Protocol {
                    url: self.cfg.base_url.to_string(),
                    message: format!("binding is missing a variable: {row:?}"),
                });
            };
            match Triple::new(s, p, o) {
                Ok(t) => out.push(ProvenancedTriple::new(t, self.cfg.name.clone())),
                Err(e) => log::debug!("dropping binding that is not a valid triple: {e}"),
            }
        }
        Ok(dedup_sorted(out))
    }

    pub fn ask_equivalent(&self, t: &Triple) -> Result<bool, RemoteError> {
        self.ask(&ask_triple_query(t))
    }

    pub fn select_sp(&self, e: &Term, p: &Term) -> Result<Vec<ProvenancedTriple>, RemoteError> {
        let rows = self.select(&select_sp_query(e, p, self.cfg.candidate_cap))?;
        self.triples_from(rows, |row| Some((e.clone(), p.clone(), row.get("o")?.clone())))
    }

    pub fn select_so(&self, e: &Term, o: &Term) -> Result<Vec<ProvenancedTriple>, RemoteError> {
        let rows = self.select(&select_so_query(e, o, self.cfg.candidate_cap))?;
        self.triples_from(rows, |row| Some((e.clone(), row.get("p")?.clone(), o.clone())))
    }

    /// Triples with `e` as subject or object, capped at the configured limit.
    pub fn select_all(&self, e: &Term) -> Result<CandidateBatch, RemoteError> {
        let cap = self.cfg.candidate_cap;
        let outgoing = self.select(&select_outgoing_query(e, cap + 1))?;
        let mut triples =
            self.triples_from(outgoing, |row| Some((e.clone(), row.get("p")?.clone(), row.get("o")?.clone())))?;
        let incoming = self.select(&select_incoming_query(e, cap + 1))?;
        triples.extend(
            self.triples_from(incoming, |row| Some((row.get("s")?.clone(), row.get("p")?.clone(), e.clone())))?,
        );
        Ok(CandidateBatch::capped(dedup_sorted(triples), cap))
    }

    pub fn check_dereferencable(&self, uri: &Iri) -> Result<bool, RemoteError> {
        self.ask(&dereferencable_query(uri))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_shapes() {
        let t = Triple::new(
            Term::iri("http://dbpedia.org/resource/Aristotle").unwrap(),
            Term::iri("http://dbpedia.org/ontology/birthDate").unwrap(),
            Term::Literal(Literal::typed("384 BC", Iri::new("http://www.w3.org/2001/XMLSchema#string").unwrap())),
        )
        .unwrap();
        assert_eq!(
            ask_triple_query(&t),
            r#"ASK { <http://dbpedia.org/resource/Aristotle> <http://dbpedia.org/ontology/birthDate> "384 BC" }"#
        );
        let u = Iri::new("http://e.org/u").unwrap();
        assert_eq!(
            dereferencable_query(&u),
            "ASK { { <http://e.org/u> ?p ?o } UNION { ?s <http://e.org/u> ?o } UNION { ?s ?p <http://e.org/u> } }"
        );
        assert_eq!(
            select_sp_query(t.subject(), t.predicate(), 10),
            "SELECT ?o WHERE { <http://dbpedia.org/resource/Aristotle> <http://dbpedia.org/ontology/birthDate> ?o } LIMIT 10"
        );
    }

    #[test]
    fn binding_terms() {
        let lit: JsonTerm = serde_json::from_str(r#"{"type":"literal","value":"x","xml:lang":"en"}"#).unwrap();
        assert_eq!(lit.into_term().unwrap(), Term::Literal(Literal::lang("x", "en").unwrap()));
        let b: JsonTerm = serde_json::from_str(r#"{"type":"bnode","value":"b0.x"}"#).unwrap();
        assert_eq!(b.into_term().unwrap(), Term::blank("b0_x").unwrap());
        let bad: JsonTerm = serde_json::from_str(r#"{"type":"weird","value":"x"}"#).unwrap();
        assert!(bad.into_term().is_err());
    }

    #[test]
    fn rejects_wrong_kind() {
        let cfg = EndpointConfig::new("f", EndpointKind::FactService, "http://localhost:1").unwrap();
        assert!(matches!(SparqlClient::new(cfg), Err(RemoteError::Config(_))));
    }
}
