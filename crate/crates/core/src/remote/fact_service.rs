//! REST fact-service client. `GET {base}/allFacts?uri=<e>` answers with a
//! JSON array of `{"s", "p", "o", "source"}` records; an optional
//! `"o_kind": "iri" | "literal"` disambiguates the object, otherwise an
//! object that parses as an absolute IRI is taken as one.

use serde::{Deserialize, Serialize};
use url::Url;

use super::config::{EndpointConfig, EndpointKind};
use super::http::{HttpClient, RetryPolicy};
use super::{dedup_sorted, CandidateBatch, RemoteError};
use crate::rdf::{Iri, Term, Triple};
use crate::store::ProvenancedTriple;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactRecord {
    pub s: String,
    pub p: String,
    pub o: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_kind: Option<String>,
    #[serde(default)]
    pub source: String,
}

impl FactRecord {
    pub fn from_triple(t: &ProvenancedTriple) -> Self {
        let text = |term: &Term| match term {
            Term::Iri { value } => value.as_str().to_owned(),
            Term::Literal(lit) => lit.lexical().to_owned(),
            Term::Blank { label } => format!("_:{label}"),
        };
        Self {
            s: text(t.triple.subject()),
            p: text(t.triple.predicate()),
            o: text(t.triple.object()),
            o_kind: Some(if t.triple.object().is_literal() { "literal" } else { "iri" }.to_owned()),
            source: t.source.clone(),
        }
    }

    fn node(value: &str) -> Result<Term, String> {
        match value.strip_prefix("_:") {
            Some(label) => Term::blank(label).map_err(|e| e.to_string()),
            None => Term::iri(value).map_err(|e| e.to_string()),
        }
    }

    pub fn to_triple(&self, default_source: &str) -> Result<ProvenancedTriple, String> {
        let object = match self.o_kind.as_deref() {
            Some("literal") => Term::literal(self.o.clone()),
            Some("iri") => Self::node(&self.o)?,
            Some(other) => return Err(format!("unknown o_kind {other:?}")),
            None => Iri::new(self.o.clone()).map(Term::from).unwrap_or_else(|_| Term::literal(self.o.clone())),
        };
        let triple = Triple::new(Self::node(&self.s)?, Term::iri(self.p.clone()).map_err(|e| e.to_string())?, object)
            .map_err(|e| e.to_string())?;
        let source = if self.source.trim().is_empty() { default_source } else { self.source.trim() };
        Ok(ProvenancedTriple::new(triple, source))
    }
}

#[derive(Debug)]
pub struct FactServiceClient {
    cfg: EndpointConfig,
    http: HttpClient,
}

impl FactServiceClient {
    pub fn new(cfg: EndpointConfig) -> Result<Self, RemoteError> {
        cfg.validate()?;
        if cfg.kind != EndpointKind::FactService {
            return Err(RemoteError::Config(format!("{} is not a fact service", cfg.name)));
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

    fn all_facts_url(&self, e: &Iri) -> Result<Url, RemoteError> {
        let mut url = self.cfg.base_url.clone();
        {
            let mut segments = url
                .path_segments_mut()
                .map_err(|_| RemoteError::Config(format!("{} cannot be a base URL", self.cfg.base_url)))?;
            segments.pop_if_empty().push("allFacts");
        }
        url.query_pairs_mut().append_pair("uri", e.as_str());
        Ok(url)
    }

    /// Every fact mentioning `e`, capped at the configured limit.
    pub fn select_all(&self, e: &Term) -> Result<CandidateBatch, RemoteError> {
        let Some(iri) = e.as_iri() else {
            return Err(RemoteError::Config(format!("entity {e} is not an IRI")));
        };
        let url = self.all_facts_url(iri)?;
        log::debug!("fact-service {}: GET {url}", self.cfg.name);
        let body = self
            .http
            .execute(url.as_str(), |agent| agent.get(url.as_str()).set("Accept", "application/json").call())?;
        let protocol = |message: String| RemoteError::Protocol { url: url.to_string(), message };
        let records: Vec<FactRecord> =
            serde_json::from_str(&body).map_err(|e| protocol(format!("malformed allFacts response: {e}")))?;
        let triples =
            records.iter().map(|r| r.to_triple(&self.cfg.name)).collect::<Result<Vec<_>, _>>().map_err(protocol)?;
        Ok(CandidateBatch::capped(dedup_sorted(triples), self.cfg.candidate_cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_object_kinds() {
        let rec = |o: &str, kind: Option<&str>| FactRecord {
            s: "http://e.org/a".into(),
            p: "http://e.org/p".into(),
            o: o.into(),
            o_kind: kind.map(str::to_owned),
            source: "".into(),
        };
        let t = rec("http://e.org/b", None).to_triple("svc").unwrap();
        assert!(t.triple.object().is_iri());
        assert_eq!(t.source, "svc");
        assert!(rec("1883-05-13", None).to_triple("svc").unwrap().triple.object().is_literal());
        assert!(rec("http://e.org/b", Some("literal")).to_triple("svc").unwrap().triple.object().is_literal());
        assert!(rec("not an iri", Some("iri")).to_triple("svc").is_err());
        assert!(rec("x", Some("other")).to_triple("svc").is_err());
    }

    #[test]
    fn all_facts_url_shape() {
        let cfg = EndpointConfig::new("lods", EndpointKind::FactService, "http://localhost:8080/api/").unwrap();
        let client = FactServiceClient::new(cfg).unwrap();
        let url = client.all_facts_url(&Iri::new("http://dbpedia.org/resource/Aristotle").unwrap()).unwrap();
        assert_eq!(
            url.as_str(),
            "http://localhost:8080/api/allFacts?uri=http%3A%2F%2Fdbpedia.org%2Fresource%2FAristotle"
        );
    }
}
