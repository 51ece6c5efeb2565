//! Remote knowledge-graph access: a SPARQL 1.1 Protocol client and a REST
//! fact-service client sharing one rate-limited, retrying HTTP layer.

mod config;
mod fact_service;
mod http;
mod sparql;

pub use config::{
    EndpointConfig, EndpointKind, DEFAULT_CANDIDATE_CAP, DEFAULT_MAX_RETRIES, DEFAULT_RATE_LIMIT, DEFAULT_TIMEOUT,
};
pub use fact_service::{FactRecord, FactServiceClient};
pub use http::{is_transient_status, HttpClient, RateLimiter, RetryPolicy};
pub use sparql::{
    ask_triple_query, dereferencable_query, query_term, select_incoming_query, select_outgoing_query, select_so_query,
    select_sp_query, SparqlClient, RESULTS_JSON,
};

use thiserror::Error;

use crate::backend::CandidateBatch;
use crate::store::ProvenancedTriple;

#[derive(Debug, Error)]
pub enum RemoteError {
    /// Network failure, timeout or a transient status after all retries.
    #[error("transport error from {url}: {message}")]
    Transport { url: String, message: String },
    /// Non-transient HTTP status or a malformed response body. Never retried.
    #[error("protocol error from {url}: {message}")]
    Protocol { url: String, message: String },
    #[error("endpoint configuration: {0}")]
    Config(String),
}

impl RemoteError {
    pub fn is_transport(&self) -> bool {
        matches!(self, Self::Transport { .. })
    }

    pub fn is_protocol(&self) -> bool {
        matches!(self, Self::Protocol { .. })
    }
}

/// Sorts by (canonical line, source) and drops exact duplicates.
pub(crate) fn dedup_sorted(mut triples: Vec<ProvenancedTriple>) -> Vec<ProvenancedTriple> {
    let mut keyed: Vec<(String, ProvenancedTriple)> = triples.drain(..).map(|t| (t.triple.canonical(), t)).collect();
    keyed.sort_by(|(ca, a), (cb, b)| ca.cmp(cb).then_with(|| a.source.cmp(&b.source)));
    keyed.dedup_by(|(ca, a), (cb, b)| ca == cb && a.source == b.source);
    keyed.into_iter().map(|(_, t)| t).collect()
}
