// Oracles index adjacency matrices by node number.
#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;

use kgvalid_core::encoder::{cosine, Embedding, FallbackEncoder, DEFAULT_SEED};
use kgvalid_core::rdf::prefix::{OWL_EQUIVALENT_PROPERTY, OWL_SAME_AS};
use kgvalid_core::rdf::{parse_triples, serialize_triple, Iri, Literal, PrefixMap, Term, Triple};
use kgvalid_core::store::equivalence::EquivalenceIndex;
use kgvalid_core::store::{KnowledgeGraph, ProvenancedTriple};
use kgvalid_core::verbalize::Verbalizer;
use kgvalid_testkit::gen::{self, RandomKgParams};
use proptest::prelude::*;

const NAMESPACES: [&str; 4] = [
    "http://ex.org/",
    "http://dbpedia.org/resource/",
    "http://dbpedia.org/ontology/",
    "http://www.wikidata.org/entity/",
];

fn arb_iri() -> impl Strategy<Value = Term> {
    (0..NAMESPACES.len(), "[A-Za-z][A-Za-z0-9_]{0,10}")
        .prop_map(|(ns, local)| Term::iri(format!("{}{local}", NAMESPACES[ns])).unwrap())
}

fn arb_literal() -> impl Strategy<Value = Term> {
    let lexical = prop_oneof![
        "[a-zA-Z0-9 ]{0,12}",
        "\\PC{0,12}",
        Just("with \"quotes\" and \\ backslash".to_owned()),
        Just("line\nbreak\ttab".to_owned()),
    ];
    (lexical, 0..3u8, "[a-z]{2}(-[A-Z]{2})?").prop_map(|(lex, kind, tag)| match kind {
        0 => Term::literal(lex),
        1 => Term::Literal(Literal::typed(lex, Iri::new("http://www.w3.org/2001/XMLSchema#string").unwrap())),
        _ => Term::Literal(Literal::lang(lex, tag).unwrap()),
    })
}

fn arb_blank() -> impl Strategy<Value = Term> {
    "[a-z][a-z0-9]{0,6}".prop_map(|l| Term::blank(l).unwrap())
}

fn arb_triple() -> impl Strategy<Value = Triple> {
    let subject = prop_oneof![4 => arb_iri(), 1 => arb_blank()];
    let object = prop_oneof![3 => arb_iri(), 3 => arb_literal(), 1 => arb_blank()];
    (subject, arb_iri(), object).prop_map(|(s, p, o)| Triple::new(s, p, o).unwrap())
}

/// Reflexive, symmetric, transitive closure by Warshall's algorithm.
fn warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        r[a][b] = true;
        r[b][a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn kg_from_seed(seed: u64, triples: usize) -> (Vec<ProvenancedTriple>, RandomKgParams, gen::ChaCha8Rng) {
    let mut rng = gen::rng(seed);
    let params = RandomKgParams::with_triples(triples);
    let kg = gen::random_kg(&mut rng, &params);
    (kg, params, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_round_trip(triples in prop::collection::vec(arb_triple(), 0..40)) {
        let text: String = triples.iter().map(|t| serialize_triple(t, None) + "\n").collect();
        let report = parse_triples(&text, &PrefixMap::empty());
        prop_assert_eq!(report.skipped().count(), 0);
        prop_assert_eq!(&report.triples, &triples);
    }

    #[test]
    fn prefixed_round_trip(triples in prop::collection::vec(arb_triple(), 0..40)) {
        let prefixes = PrefixMap::default();
        let text: String = triples.iter().map(|t| serialize_triple(t, Some(&prefixes)) + "\n").collect();
        let report = parse_triples(&text, &prefixes);
        prop_assert_eq!(&report.triples, &triples);
    }

    #[test]
    fn every_line_is_accounted_for(lines in prop::collection::vec(
        prop_oneof![
            arb_triple().prop_map(|t| serialize_triple(&t, None)),
            "\\PC{0,30}",
            Just(String::new()),
            Just("# comment".to_owned()),
            Just("@prefix ex: <http://ex.org/> .".to_owned()),
            Just("```turtle".to_owned()),
            Just("Here are the facts:".to_owned()),
            Just("_:b dbo:p dbr:X .".to_owned()),
        ],
        0..30,
    )) {
        let text = lines.join("\n");
        let report = parse_triples(&text, &PrefixMap::default());
        let total = text.lines().count();
        prop_assert_eq!(report.triples.len() + report.skipped().count() + report.ignored_lines, total);
        prop_assert_eq!(report.triples.len(), report.triple_lines.len());
        let skipped: HashSet<usize> = report.skipped().map(|d| d.line).collect();
        prop_assert!(report.triple_lines.iter().all(|l| !skipped.contains(l)));
    }

    #[test]
    fn compaction_is_invertible(ns in 0..NAMESPACES.len(), local in "[A-Za-z0-9_.%-]{0,12}") {
        let prefixes = PrefixMap::default();
        let iri = format!("{}{local}", NAMESPACES[ns]);
        if let Some(short) = prefixes.compact(&iri) {
            prop_assert_eq!(prefixes.expand(&short), Some(iri));
        }
    }

    #[test]
    fn closure_matches_warshall(n in 1usize..40, edges in prop::collection::vec((0usize..40, 0usize..40), 0..200)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let triples: Vec<Triple> = edges
            .iter()
            .map(|&(a, b)| gen::triple(gen::entity(a), gen::iri(OWL_SAME_AS), gen::entity(b)))
            .collect();
        let index = EquivalenceIndex::from_triples(&triples);
        let oracle = warshall(n, &edges);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(index.equivalent_nodes(&gen::entity(i), &gen::entity(j)), oracle[i][j]);
            }
        }
    }

    #[test]
    fn entity_triples_match_a_full_scan(seed in any::<u64>(), pick in 0usize..1000) {
        let (triples, params, _) = kg_from_seed(seed, 300);
        let kg = KnowledgeGraph::from_triples(triples.clone());
        let e = gen::entity(pick % params.entities);
        let eq = kg.equivalence();
        let expected: HashSet<&ProvenancedTriple> = triples
            .iter()
            .filter(|t| eq.equivalent_nodes(t.triple.subject(), &e) || eq.equivalent_nodes(t.triple.object(), &e))
            .collect();
        let got = kg.triples_of_entity(&e).unwrap();
        let got_set: HashSet<&ProvenancedTriple> = got.iter().copied().collect();
        prop_assert_eq!(got.len(), got_set.len());
        prop_assert_eq!(got_set, expected);
    }

    #[test]
    fn find_equivalent_matches_a_full_scan(seed in any::<u64>()) {
        let (triples, params, mut rng) = kg_from_seed(seed, 300);
        let kg = KnowledgeGraph::from_triples(triples.clone());
        let eq = kg.equivalence();
        for _ in 0..20 {
            let fact = gen::random_fact(&mut rng, &triples, &params);
            let matches = |t: &ProvenancedTriple| {
                eq.node_key(t.triple.subject()) == eq.node_key(fact.subject())
                    && eq.predicate_key(t.triple.predicate()) == eq.predicate_key(fact.predicate())
                    && eq.node_key(t.triple.object()) == eq.node_key(fact.object())
            };
            match kg.find_equivalent(&fact).unwrap() {
                Some(hit) => prop_assert!(matches(hit)),
                None => prop_assert!(!triples.iter().any(matches)),
            }
        }
    }

    #[test]
    fn adding_triples_never_loses_a_match(seed in any::<u64>()) {
        let (triples, params, mut rng) = kg_from_seed(seed, 200);
        let (extra, _, _) = kg_from_seed(seed.wrapping_add(1), 100);
        let small = KnowledgeGraph::from_triples(triples.clone());
        let big = KnowledgeGraph::from_triples(triples.iter().cloned().chain(extra));
        for _ in 0..20 {
            let fact = gen::random_fact(&mut rng, &triples, &params);
            if small.find_equivalent(&fact).unwrap().is_some() {
                prop_assert!(big.find_equivalent(&fact).unwrap().is_some());
            }
        }
    }

    #[test]
    fn sentences_are_clean(t in arb_triple()) {
        let v = Verbalizer::default();
        let iri_only = t.object().is_iri() && t.subject().is_iri();
        let sentence = v.convert_triple(&t, None).sentence;
        prop_assert_eq!(&sentence, &v.convert_triple(&t, None).sentence);
        prop_assert!(!sentence.contains("  "));
        prop_assert_eq!(sentence.trim(), sentence.as_str());
        if iri_only {
            prop_assert!(!sentence.contains("http://"));
            prop_assert!(!sentence.contains('_'));
            prop_assert!(!sentence.contains(':'));
            let again = v.convert_term(&Term::literal(sentence.clone()), None);
            prop_assert_eq!(again, sentence);
        }
    }

    #[test]
    fn cosine_is_symmetric_and_scale_invariant(
        a in prop::collection::vec(-10.0f64..10.0, 8),
        b in prop::collection::vec(-10.0f64..10.0, 8),
        s in 0.001f64..1000.0,
    ) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-6) && b.iter().any(|x| x.abs() > 1e-6));
        let u = Embedding::new(a).unwrap();
        let v = Embedding::new(b).unwrap();
        let uv = cosine(&u, &v).unwrap();
        prop_assert!((uv - cosine(&v, &u).unwrap()).abs() <= 1e-12);
        prop_assert!((uv - cosine(&u.scaled(s).unwrap(), &v).unwrap()).abs() <= 1e-9);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&uv));
        prop_assert!((cosine(&u, &u).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fallback_embeddings_are_unit_and_deterministic(text in "\\PC{0,40}") {
        let enc = FallbackEncoder::new(384, DEFAULT_SEED);
        let e = enc.embed(&text);
        prop_assert_eq!(e.dimension(), 384);
        let again = enc.embed(&text);
        prop_assert_eq!(e.values(), again.values());
        let norm = e.norm();
        prop_assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-9);
    }
}

#[test]
fn equivalent_property_links_close_over_predicates() {
    let p = |i| gen::predicate(i);
    let triples = vec![
        gen::triple(p(0), gen::iri(OWL_EQUIVALENT_PROPERTY), p(1)),
        gen::triple(p(2), gen::iri(OWL_EQUIVALENT_PROPERTY), p(1)),
    ];
    let index = EquivalenceIndex::from_triples(&triples);
    assert_eq!(index.predicate_key(&p(0)), index.predicate_key(&p(2)));
    assert_ne!(index.predicate_key(&p(0)), index.predicate_key(&p(3)));
    // property links never merge resources
    assert!(!index.equivalent_nodes(&p(0), &p(2)));
}
