use std::sync::atomic::{AtomicUsize, Ordering};

use kgvalid_core::backend::{Backend, BackendError, CandidateBatch, LocalBackend};
use kgvalid_core::benchmark::{classify, evaluate, parse_benchmark, EvalOptions, Gold, OutcomeClass};
use kgvalid_core::llm::{extract_facts, LlmClient, LlmClientConfig, LlmError};
use kgvalid_core::store::{PairKind, ProvenancedTriple};
use kgvalid_core::validator::{Rule, ValidateError};
use kgvalid_core::{EncoderHandle, KnowledgeGraph, PrefixMap, Term, Triple, Validator};
use kgvalid_testkit::gen::{self, synthetic_suite, RandomKgParams};
use kgvalid_testkit::{MockSidecar, SidecarFault, StubResponse, StubServer};
use serde_json::{json, Value};

/// Wraps a backend and counts calls per rule.
struct Counting<B> {
    inner: B,
    calls: [AtomicUsize; 3],
}

impl<B: Backend> Counting<B> {
    fn new(inner: B) -> Self {
        Self { inner, calls: Default::default() }
    }

    fn counts(&self) -> [usize; 3] {
        [0, 1, 2].map(|i| self.calls[i].load(Ordering::SeqCst))
    }
}

impl<B: Backend> Backend for Counting<B> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn equivalent_triple(&self, t: &Triple) -> Result<Option<ProvenancedTriple>, BackendError> {
        self.calls[0].fetch_add(1, Ordering::SeqCst);
        self.inner.equivalent_triple(t)
    }

    fn pair_candidates(&self, t: &Triple) -> Result<Vec<(ProvenancedTriple, PairKind)>, BackendError> {
        self.calls[1].fetch_add(1, Ordering::SeqCst);
        self.inner.pair_candidates(t)
    }

    fn entity_triples(&self, e: &Term) -> Result<CandidateBatch, BackendError> {
        self.calls[2].fetch_add(1, Ordering::SeqCst);
        self.inner.entity_triples(e)
    }
}

fn local_backend(seed: u64) -> (LocalBackend, Vec<Triple>) {
    let mut rng = gen::rng(seed);
    let params = RandomKgParams::with_triples(400);
    let triples = gen::random_kg(&mut rng, &params);
    let facts = (0..60).map(|_| gen::random_fact(&mut rng, &triples, &params)).collect();
    (LocalBackend::new(KnowledgeGraph::from_triples(triples)), facts)
}

#[test]
fn later_rules_run_only_when_earlier_ones_are_empty() {
    let (backend, facts) = local_backend(3);
    let backend = Counting::new(backend);
    let v = Validator::default();
    for fact in &facts {
        let before = backend.counts();
        let set = v.find_candidates(fact, &backend).unwrap();
        let after = backend.counts();
        let delta = [0, 1, 2].map(|i| after[i] - before[i]);
        let expected = match set.rule {
            Rule::A => [1, 0, 0],
            Rule::B => [1, 1, 0],
            Rule::C => [1, 1, 1],
        };
        assert_eq!(delta, expected, "{fact}");
    }
    let [a, b, c] = backend.counts();
    assert!(a > b && b > c && c > 0, "generator exercises every rule: {a} {b} {c}");
}

#[test]
fn blank_subjects_fail_only_their_slot() {
    let (backend, mut facts) = local_backend(5);
    let blank = Triple::new(Term::blank("x").unwrap(), gen::predicate(0), gen::entity(1)).unwrap();
    facts.insert(3, blank);
    let enc = EncoderHandle::fallback(384);
    let out = Validator::default().validate_batch(&facts, &backend, &enc, 3, 4);
    assert_eq!(out.len(), facts.len());
    assert!(matches!(out[3], Err(ValidateError::BlankSubject(_))));
    assert!(out.iter().enumerate().all(|(i, r)| i == 3 || r.is_ok()));
}

#[test]
fn batch_output_ignores_parallelism() {
    let (backend, facts) = local_backend(11);
    let enc = EncoderHandle::fallback(384);
    let v = Validator::default();
    let render = |p| {
        v.validate_batch(&facts, &backend, &enc, 3, p)
            .into_iter()
            .map(|r| r.map(|r| serde_json::to_string(&r).unwrap()).map_err(|e| e.to_string()))
            .collect::<Vec<_>>()
    };
    let one = render(1);
    assert_eq!(one, render(8));
    assert_eq!(one, render(3));
    assert!(v.validate_batch(&[], &backend, &enc, 3, 8).is_empty());
}

#[test]
fn zero_k_is_rejected() {
    let (backend, facts) = local_backend(1);
    let enc = EncoderHandle::fallback(384);
    assert!(matches!(Validator::default().validate(&facts[0], &backend, &enc, 0), Err(ValidateError::ZeroK)));
}

#[test]
fn sidecar_scores_match_the_in_process_encoder() {
    let sidecar = MockSidecar::start(384);
    let remote = EncoderHandle::sidecar(&sidecar.addr()).unwrap();
    assert_eq!(remote.kind(), "sidecar");
    assert_eq!(remote.dimension(), 384);
    assert_eq!(remote.model_name(), kgvalid_testkit::sidecar::MOCK_MODEL);
    let local = EncoderHandle::fallback(384);
    let (backend, facts) = local_backend(9);
    let v = Validator::default();
    for fact in facts.iter().take(20) {
        let a = v.validate(fact, &backend, &remote, 3).unwrap();
        let b = v.validate(fact, &backend, &local, 3).unwrap();
        assert_eq!(a.matches.len(), b.matches.len());
        for (x, y) in a.matches.iter().zip(&b.matches) {
            assert!((x.score - y.score).abs() < 1e-12);
        }
    }
    // one batched request per fact with candidates
    assert!(sidecar.encode_requests() <= 40);
}

#[test]
fn sidecar_faults_are_encode_errors() {
    let (backend, facts) = local_backend(2);
    let v = Validator::default();
    for fault in [SidecarFault::WrongId, SidecarFault::ShortVectors, SidecarFault::ErrorReply] {
        let sidecar = MockSidecar::start_with(64, fault);
        let enc = EncoderHandle::sidecar(&sidecar.addr()).unwrap();
        let err = facts
            .iter()
            .map(|f| v.validate(f, &backend, &enc, 3))
            .find_map(Result::err)
            .expect("a fact with candidates");
        assert!(matches!(err, ValidateError::Encode(_)), "{fault:?}: {err}");
    }
    assert!(EncoderHandle::sidecar("127.0.0.1:9").is_err());
}

#[test]
fn llm_http_mode_speaks_chat_completions() {
    let server = StubServer::start(|req: &kgvalid_testkit::RecordedRequest| {
        let body: Value = serde_json::from_str(&req.body).unwrap_or(Value::Null);
        if req.header("Authorization") != Some("Bearer test-key") || body["model"] != "gpt-3.5-turbo" {
            return StubResponse::status(401, "unauthorized");
        }
        let content = "```\ndbr:Elytis dbo:award dbr:Nobel_Prize_in_Literature .\n```";
        StubResponse::json(json!({"choices": [{"message": {"content": content}}]}).to_string())
    });
    let mut cfg = LlmClientConfig::http(server.url());
    cfg.api_key_env = "KGVALID_TEST_LLM_KEY".into();
    let client = LlmClient::new(cfg.clone()).unwrap();
    assert!(matches!(client.fetch_response("p"), Err(LlmError::MissingKey(_))));
    std::env::set_var("KGVALID_TEST_LLM_KEY", "test-key");
    let text = client.fetch_response("p").unwrap();
    let report = extract_facts(&text, &PrefixMap::default());
    assert_eq!(report.triples.len(), 1);
    assert_eq!(report.ignored_lines, 2);
    let req = &server.requests()[0];
    assert!(req.url.ends_with("/chat/completions"));
    assert_eq!(req.method, "POST");
}

#[test]
fn classification_is_monotone_in_tau() {
    let suite = synthetic_suite(17);
    let records = parse_benchmark(&suite.benchmark, &PrefixMap::default()).unwrap();
    let backend = LocalBackend::new(KnowledgeGraph::from_triples(suite.triples));
    let enc = EncoderHandle::fallback(384);
    let eval = evaluate(&records, &backend, &enc, &Validator::default(), EvalOptions::default()).unwrap();
    let taus: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 * 0.05).collect();
    for outcome in &eval.outcomes {
        let res = outcome.result.as_ref().unwrap();
        let validated: Vec<bool> =
            taus.iter().map(|&t| matches!(classify(res, Gold::Correct, t), OutcomeClass::C1)).collect();
        // once rejected at some tau, rejected at every larger tau
        assert!(validated.windows(2).all(|w| w[0] || !w[1]), "{}", res.fact);
    }
}

#[test]
fn evaluate_rejects_bad_options() {
    let backend = LocalBackend::new(KnowledgeGraph::from_triples([]));
    let enc = EncoderHandle::fallback(16);
    let v = Validator::default();
    for opts in [
        EvalOptions { tau: 1.5, ..EvalOptions::default() },
        EvalOptions { tau: f64::NAN, ..EvalOptions::default() },
        EvalOptions { k: 0, ..EvalOptions::default() },
    ] {
        assert!(evaluate(&[], &backend, &enc, &v, opts).is_err());
    }
}
