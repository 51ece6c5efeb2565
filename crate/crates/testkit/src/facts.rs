//! Fact-service stub: `GET /allFacts?uri=<e>` over a fixed triple list.

use kgvalid_core::remote::FactRecord;
use kgvalid_core::store::ProvenancedTriple;

use crate::server::{Handler, RecordedRequest, StubResponse};

pub fn all_facts_for(uri: &str, triples: &[ProvenancedTriple]) -> Vec<FactRecord> {
    triples
        .iter()
        .filter(|t| {
            [t.triple.subject(), t.triple.object()].iter().any(|term| term.as_iri().map(|i| i.as_str()) == Some(uri))
        })
        .map(FactRecord::from_triple)
        .collect()
}

/// Serves `allFacts` over `triples`; other paths get 404.
pub fn fact_service_handler(triples: Vec<ProvenancedTriple>) -> impl Handler {
    move |req: &RecordedRequest| {
        let Ok(url) = url::Url::parse(&format!("http://stub{}", req.url)) else {
            return StubResponse::status(400, "bad url");
        };
        if url.path_segments().and_then(|mut s| s.next_back()) != Some("allFacts") {
            return StubResponse::status(404, "not found");
        }
        let Some(uri) = url.query_pairs().find(|(k, _)| k == "uri").map(|(_, v)| v.into_owned()) else {
            return StubResponse::status(400, "missing uri");
        };
        let records = all_facts_for(&uri, &triples);
        StubResponse::json(serde_json::to_string(&records).expect("records serialize"))
    }
}

/// Serves exactly `records` for any `allFacts` request.
pub fn canned_facts_handler(records: Vec<FactRecord>) -> impl Handler {
    let body = serde_json::to_string(&records).expect("records serialize");
    move |_: &RecordedRequest| StubResponse::json(body.clone())
}
