use std::time::Duration;

use kgvalid_core::backend::{Backend, FactServiceBackend, SparqlBackend};
use kgvalid_core::rdf::{Iri, Term, Triple};
use kgvalid_core::remote::{EndpointConfig, EndpointKind, FactRecord, FactServiceClient, SparqlClient};
use kgvalid_core::store::{PairKind, ProvenancedTriple};
use kgvalid_core::validator::Rule;
use kgvalid_core::{EncoderHandle, Validator};
use kgvalid_testkit::facts::{canned_facts_handler, fact_service_handler};
use kgvalid_testkit::gen::{iri, triple, DBO, DBR};
use kgvalid_testkit::sparql::sparql_handler;
use kgvalid_testkit::{failing_first, fixed, StubResponse, StubServer};

fn cfg(kind: EndpointKind, url: &str) -> EndpointConfig {
    let mut cfg = EndpointConfig::new("stub", kind, url).unwrap();
    cfg.retry_backoff = Duration::ZERO;
    cfg.rate_limit = 10_000.0;
    cfg.timeout = Duration::from_secs(5);
    cfg
}

fn dbr(local: &str) -> Term {
    iri(format!("{DBR}{local}"))
}

fn dbo(local: &str) -> Term {
    iri(format!("{DBO}{local}"))
}

fn sample() -> Vec<Triple> {
    vec![
        triple(dbr("Aristophanes"), dbo("genre"), dbr("Comedy")),
        triple(dbr("Aristophanes"), dbo("birthPlace"), dbr("Athens")),
        triple(dbr("Aristophanes"), dbo("birthDate"), Term::literal("446 BC")),
        triple(dbr("Menander"), dbo("influencedBy"), dbr("Aristophanes")),
        triple(dbr("Athens"), dbo("country"), dbr("Greece")),
    ]
}

#[test]
fn transient_statuses_are_retried() {
    let server = StubServer::start(failing_first([503, 503], sparql_handler(sample())));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    assert!(client.ask_equivalent(&sample()[0]).unwrap());
    assert_eq!(client.http().retry_events(), 2);
    assert_eq!(server.request_count(), 3);
}

#[test]
fn retries_are_bounded() {
    let server = StubServer::start(failing_first([503; 10], sparql_handler(sample())));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    let err = client.ask_equivalent(&sample()[0]).unwrap_err();
    assert!(err.is_transport(), "{err}");
    assert_eq!(server.request_count(), 3);
}

#[test]
fn protocol_errors_are_not_retried() {
    let server = StubServer::start(fixed(StubResponse::status(400, "bad query")));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    let err = client.ask_equivalent(&sample()[0]).unwrap_err();
    assert!(err.is_protocol(), "{err}");
    assert_eq!(server.request_count(), 1);
    assert_eq!(client.http().retry_events(), 0);
}

#[test]
fn malformed_results_are_protocol_errors() {
    let server = StubServer::start(fixed(StubResponse::json("{\"head\": {}}")));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    assert!(client.ask_equivalent(&sample()[0]).unwrap_err().is_protocol());
    assert!(client.select_sp(&dbr("A"), &dbo("b")).unwrap_err().is_protocol());
}

#[test]
fn requests_respect_the_rate_limit() {
    let server = StubServer::start(sparql_handler(sample()));
    let mut c = cfg(EndpointKind::Sparql, &server.url());
    c.rate_limit = 20.0;
    let client = SparqlClient::new(c).unwrap();
    for _ in 0..5 {
        client.ask_equivalent(&sample()[0]).unwrap();
    }
    let times: Vec<_> = server.requests().iter().map(|r| r.at).collect();
    for pair in times.windows(2) {
        // 50 ms spacing, minus scheduling slack on the receiving side
        assert!(pair[1] - pair[0] >= Duration::from_millis(40), "{:?}", pair[1] - pair[0]);
    }
}

#[test]
fn queries_are_posted_as_forms() {
    let server = StubServer::start(sparql_handler(sample()));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    client.select_sp(&dbr("Aristophanes"), &dbo("genre")).unwrap();
    let req = &server.requests()[0];
    assert_eq!(req.method, "POST");
    assert!(req.body.starts_with("query="));
    assert!(req.header("Accept").unwrap().contains("sparql-results+json"));
}

#[test]
fn entity_triples_are_capped() {
    let e = dbr("Hub");
    let data: Vec<Triple> = (0..6000).map(|i| triple(e.clone(), dbo("link"), dbr(&format!("N{i}")))).collect();
    let server = StubServer::start(sparql_handler(data));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    let batch = client.select_all(&e).unwrap();
    assert_eq!(batch.triples.len(), 5000);
    assert!(batch.truncated);

    let mut small = cfg(EndpointKind::Sparql, &server.url());
    small.candidate_cap = 7000;
    let batch = SparqlClient::new(small).unwrap().select_all(&e).unwrap();
    assert_eq!(batch.triples.len(), 6000);
    assert!(!batch.truncated);
}

#[test]
fn entity_triples_cover_both_directions_once() {
    let mut data = sample();
    data.push(triple(dbr("Aristophanes"), dbo("admired"), dbr("Aristophanes")));
    let server = StubServer::start(sparql_handler(data));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    let batch = client.select_all(&dbr("Aristophanes")).unwrap();
    // three outgoing, one incoming, the self-loop once
    assert_eq!(batch.triples.len(), 5);
    assert!(batch.triples.iter().all(|t| t.source == "stub"));

    // an entity that only ever occurs as an object
    let batch = client.select_all(&dbr("Greece")).unwrap();
    assert_eq!(batch.triples.len(), 1);
    assert_eq!(batch.triples[0].triple, sample()[4]);
}

#[test]
fn predicates_are_dereferencable() {
    let server = StubServer::start(sparql_handler(sample()));
    let client = SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap();
    let genre = Iri::new(format!("{DBO}genre")).unwrap();
    assert!(client.check_dereferencable(&genre).unwrap());
    let missing = Iri::new(format!("{DBO}nothing")).unwrap();
    assert!(!client.check_dereferencable(&missing).unwrap());
}

#[test]
fn sparql_backend_applies_rules_in_order() {
    let server = StubServer::start(sparql_handler(sample()));
    let backend = SparqlBackend::new(SparqlClient::new(cfg(EndpointKind::Sparql, &server.url())).unwrap());
    let enc = EncoderHandle::fallback(384);
    let v = Validator::default();

    let exact = v.validate(&sample()[0], &backend, &enc, 3).unwrap();
    assert_eq!(exact.rule, Rule::A);
    assert_eq!(exact.matches[0].triple.source, "stub");
    assert_eq!(exact.matches[0].score, 1.0);

    let wrong_object = triple(dbr("Aristophanes"), dbo("genre"), dbr("Tragedy"));
    let b = v.validate(&wrong_object, &backend, &enc, 3).unwrap();
    assert_eq!(b.rule, Rule::B);
    assert_eq!(b.matches.len(), 1);

    let unrelated = triple(dbr("Aristophanes"), dbo("spouse"), dbr("Nobody"));
    let c = v.validate(&unrelated, &backend, &enc, 3).unwrap();
    assert_eq!(c.rule, Rule::C);
    assert_eq!(c.candidate_count, 4);
    assert_eq!(c.matches.len(), 3);
}

#[test]
fn sparql_backend_rejects_wrong_kind() {
    assert!(SparqlClient::new(cfg(EndpointKind::FactService, "http://127.0.0.1:1/")).is_err());
    assert!(FactServiceClient::new(cfg(EndpointKind::Sparql, "http://127.0.0.1:1/")).is_err());
}

fn provenanced() -> Vec<ProvenancedTriple> {
    let sources = ["dbpedia", "wikidata", "yago", "dbpedia", "dbpedia"];
    sample().into_iter().zip(sources).map(|(t, s)| ProvenancedTriple::new(t, s)).collect()
}

#[test]
fn fact_service_keeps_sources_and_caches_per_entity() {
    let server = StubServer::start(fact_service_handler(provenanced()));
    let url = format!("{}api/", server.url());
    let backend = FactServiceBackend::new(FactServiceClient::new(cfg(EndpointKind::FactService, &url)).unwrap());

    let hit = backend.equivalent_triple(&sample()[1]).unwrap().unwrap();
    assert_eq!(hit.source, "wikidata");
    let pairs = backend.pair_candidates(&triple(dbr("Aristophanes"), dbo("genre"), dbr("Athens"))).unwrap();
    // canonical order: the birthPlace triple sorts before the genre triple
    let kinds: Vec<PairKind> = pairs.iter().map(|(_, k)| *k).collect();
    assert_eq!(kinds, vec![PairKind::SameObject, PairKind::SamePredicate]);
    let all = backend.entity_triples(&dbr("Aristophanes")).unwrap();
    assert_eq!(all.triples.len(), 4);
    assert_eq!(server.request_count(), 1, "one allFacts call per entity");

    let req = &server.requests()[0];
    assert!(req.url.starts_with("/api/allFacts?uri="), "{}", req.url);
}

#[test]
fn fact_service_literal_objects_match_lexically() {
    let typed = FactRecord {
        s: format!("{DBR}Aristophanes"),
        p: format!("{DBO}birthDate"),
        o: "446 BC".into(),
        o_kind: Some("literal".into()),
        source: String::new(),
    };
    let server = StubServer::start(canned_facts_handler(vec![typed]));
    let backend =
        FactServiceBackend::new(FactServiceClient::new(cfg(EndpointKind::FactService, &server.url())).unwrap());
    let fact = triple(dbr("Aristophanes"), dbo("birthDate"), Term::literal("446 BC"));
    let hit = backend.equivalent_triple(&fact).unwrap().unwrap();
    // an empty source falls back to the endpoint name
    assert_eq!(hit.source, "stub");
}

#[test]
fn fact_service_errors_surface() {
    let server = StubServer::start(fixed(StubResponse::status(404, "nope")));
    let backend =
        FactServiceBackend::new(FactServiceClient::new(cfg(EndpointKind::FactService, &server.url())).unwrap());
    let err = backend.entity_triples(&dbr("X")).unwrap_err();
    assert!(!err.is_transport());
    let server = StubServer::start(fixed(StubResponse::json("not json")));
    let backend =
        FactServiceBackend::new(FactServiceClient::new(cfg(EndpointKind::FactService, &server.url())).unwrap());
    assert!(backend.entity_triples(&dbr("X")).is_err());
}
