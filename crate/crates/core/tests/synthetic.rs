use kgvalid_core::benchmark::{evaluate, parse_benchmark, EvalOptions, OutcomeClass};
use kgvalid_core::{EncoderHandle, KnowledgeGraph, LocalBackend, PrefixMap, Validator};
use kgvalid_testkit::gen::synthetic_suite;

#[test]
fn synthetic_suite_lands_in_constructed_classes() {
    for seed in [1, 7, 42, 1234, 99_999] {
        check_seed(seed);
    }
}

fn check_seed(seed: u64) {
    let suite = synthetic_suite(seed);
    let records = parse_benchmark(&suite.benchmark, &PrefixMap::default()).unwrap();
    assert_eq!(records.len(), 120);
    let backend = LocalBackend::new(KnowledgeGraph::from_triples(suite.triples.clone()));
    let enc = EncoderHandle::fallback(384);
    let eval = evaluate(&records, &backend, &enc, &Validator::default(), EvalOptions::default()).unwrap();
    let mut wrong = Vec::new();
    for (i, o) in eval.outcomes.iter().enumerate() {
        let expected = [OutcomeClass::C1, OutcomeClass::C3, OutcomeClass::C2, OutcomeClass::C4][i / 30];
        if o.class != Some(expected) {
            let r = o.result.as_ref().unwrap();
            wrong.push(format!(
                "{i} {:?} rule {} best {:?}",
                o.class,
                r.rule,
                r.best().map(|b| (b.score, b.sentence.clone(), r.fact_sentence.clone()))
            ));
        }
    }
    let o = &eval.report.overall;
    assert!(wrong.is_empty(), "seed {seed}: {wrong:#?}");
    let a = &eval.report.rule_usage[0];
    assert_eq!((a.rule.as_str(), a.c2, a.c4), ("A", 0, 0));
    assert_eq!([o.c1, o.c2, o.c3, o.c4], suite.expected);
}
