//! Seeded generators for random graphs, facts and benchmark suites.

use std::collections::{BTreeSet, HashSet};

use kgvalid_core::rdf::prefix::{OWL_EQUIVALENT_PROPERTY, OWL_SAME_AS, RDFS_LABEL, RDF_TYPE, XSD};
use kgvalid_core::rdf::{serialize_triple, Iri, Literal, Term, Triple};
use kgvalid_core::store::ProvenancedTriple;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const EX: &str = "http://ex.org/";
pub const DBR: &str = "http://dbpedia.org/resource/";
pub const DBO: &str = "http://dbpedia.org/ontology/";
pub const WKD: &str = "http://www.wikidata.org/entity/";
pub const WKP: &str = "http://www.wikidata.org/prop/direct/";
pub const YAGO: &str = "http://yago-knowledge.org/resource/";
pub const SOURCES: [&str; 3] = ["dbpedia", "wikidata", "yago"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iri(s: impl Into<String>) -> Term {
    Term::iri(s).expect("generated IRI is valid")
}

pub fn triple(s: Term, p: Term, o: Term) -> Triple {
    Triple::new(s, p, o).expect("generated triple is valid")
}

pub fn entity(i: usize) -> Term {
    iri(format!("{EX}e{i}"))
}

pub fn predicate(i: usize) -> Term {
    iri(format!("{EX}p{i}"))
}

/// A literal with lexical form `v{i}` in one of three spellings; all three
/// are equal under lexical comparison.
pub fn literal(rng: &mut impl Rng, i: usize) -> Term {
    let lex = format!("v{i}");
    match rng.gen_range(0..3) {
        0 => Term::literal(lex),
        1 => Term::Literal(Literal::typed(lex, Iri::new(format!("{XSD}string")).expect("xsd IRI"))),
        _ => Term::Literal(Literal::lang(lex, "en").expect("valid tag")),
    }
}

#[derive(Debug, Clone)]
pub struct RandomKgParams {
    pub entities: usize,
    pub predicates: usize,
    pub literals: usize,
    pub triples: usize,
    pub same_as: usize,
    pub equivalent_properties: usize,
}

impl RandomKgParams {
    pub fn with_triples(triples: usize) -> Self {
        Self {
            entities: (triples / 8).max(4),
            predicates: (triples / 40).max(3),
            literals: (triples / 10).max(3),
            triples,
            same_as: triples / 25,
            equivalent_properties: triples / 100,
        }
    }

    pub fn without_links(mut self) -> Self {
        self.same_as = 0;
        self.equivalent_properties = 0;
        self
    }
}

pub fn random_object(rng: &mut impl Rng, params: &RandomKgParams) -> Term {
    if rng.gen_bool(0.6) {
        entity(rng.gen_range(0..params.entities))
    } else {
        let i = rng.gen_range(0..params.literals);
        literal(rng, i)
    }
}

/// Random graph over disjoint entity and predicate pools. Equivalence links
/// only join entities with entities and predicates with predicates.
pub fn random_kg(rng: &mut impl Rng, params: &RandomKgParams) -> Vec<ProvenancedTriple> {
    let mut out = Vec::with_capacity(params.triples + params.same_as + params.equivalent_properties);
    let source = |rng: &mut dyn rand::RngCore| SOURCES[rng.gen_range(0..SOURCES.len())];
    for _ in 0..params.triples {
        let t = triple(
            entity(rng.gen_range(0..params.entities)),
            predicate(rng.gen_range(0..params.predicates)),
            random_object(rng, params),
        );
        out.push(ProvenancedTriple::new(t, source(rng)));
    }
    for _ in 0..params.same_as {
        let t = triple(
            entity(rng.gen_range(0..params.entities)),
            iri(OWL_SAME_AS),
            entity(rng.gen_range(0..params.entities)),
        );
        out.push(ProvenancedTriple::new(t, source(rng)));
    }
    for _ in 0..params.equivalent_properties {
        let t = triple(
            predicate(rng.gen_range(0..params.predicates)),
            iri(OWL_EQUIVALENT_PROPERTY),
            predicate(rng.gen_range(0..params.predicates)),
        );
        out.push(ProvenancedTriple::new(t, source(rng)));
    }
    out
}

/// A fact that lands on each of the three rules with reasonable frequency:
/// a stored triple with some positions perturbed.
pub fn random_fact(rng: &mut impl Rng, kg: &[ProvenancedTriple], params: &RandomKgParams) -> Triple {
    let base = kg
        .iter()
        .filter(|t| t.triple.predicate().as_iri().is_some_and(|p| p.as_str().starts_with(EX)))
        .collect::<Vec<_>>();
    let Some(base) = base.choose(rng) else {
        return triple(entity(0), predicate(0), random_object(rng, params));
    };
    let t = &base.triple;
    let subject = if rng.gen_bool(0.15) { entity(rng.gen_range(0..params.entities)) } else { t.subject().clone() };
    let predicate_term =
        if rng.gen_bool(0.35) { predicate(rng.gen_range(0..params.predicates)) } else { t.predicate().clone() };
    let object = match rng.gen_range(0..10) {
        0..=3 => random_object(rng, params),
        4 => match t.object().as_literal() {
            // same lexical form, different datatype or language
            Some(lit) => Term::Literal(Literal::lang(lit.lexical(), "de").expect("valid tag")),
            None => t.object().clone(),
        },
        _ => t.object().clone(),
    };
    triple(subject, predicate_term, object)
}

/// Random equivalence edges over `nodes` IRIs of one kind.
pub fn random_equivalence_edges(rng: &mut impl Rng, nodes: usize, edges: usize) -> Vec<(usize, usize)> {
    (0..edges).map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes))).collect()
}

/// Candidate triples drawn from a small vocabulary so that identical
/// sentences (and so tied scores) are common.
pub fn random_candidates(rng: &mut impl Rng, n: usize) -> Vec<ProvenancedTriple> {
    let words = ["alpha", "beta", "gamma", "delta", "omega", "sigma"];
    (0..n)
        .map(|_| {
            let s = iri(format!("{DBR}{}", words.choose(rng).expect("non-empty")));
            let p = iri(format!("{DBO}{}", words.choose(rng).expect("non-empty")));
            let o = if rng.gen_bool(0.5) {
                iri(format!("{DBR}{}_{}", words.choose(rng).expect("non-empty"), rng.gen_range(0..4)))
            } else {
                Term::literal(format!("{} {}", words.choose(rng).expect("non-empty"), rng.gen_range(0..20)))
            };
            ProvenancedTriple::new(triple(s, p, o), SOURCES[rng.gen_range(0..SOURCES.len())])
        })
        .collect()
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ra", "zen", "ta", "ki", "the", "do", "vas", "pe", "ri", "nos", "ly", "sa", "mar", "gi", "to",
    "phi", "ne", "xa", "bel", "qu", "or",
];

fn word(rng: &mut impl Rng, syllables: usize) -> String {
    let mut w: String = (0..syllables).map(|_| *SYLLABLES.choose(rng).expect("non-empty")).collect();
    w[..1].make_ascii_uppercase();
    w
}

fn unique_names(rng: &mut impl Rng, n: usize, words: usize, seen: &mut HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let name: Vec<String> = (0..words)
            .map(|_| {
                let n = rng.gen_range(2..4);
                word(rng, n)
            })
            .collect();
        let name = name.join("_");
        if seen.insert(name.to_ascii_lowercase()) {
            out.push(name);
        }
    }
    out
}

/// Per-part predicate vocabulary: (type, date, place, category, relation,
/// thing, second date only published by the mirror graph).
struct Vocabulary {
    part: &'static str,
    class: &'static str,
    date: &'static str,
    place: &'static str,
    category: &'static str,
    relation: &'static str,
    thing: &'static str,
    second_date: &'static str,
}

const VOCABULARY: [Vocabulary; 3] = [
    Vocabulary {
        part: "persons",
        class: "Person",
        date: "birthDate",
        place: "birthPlace",
        category: "occupation",
        relation: "spouse",
        thing: "award",
        second_date: "deathDate",
    },
    Vocabulary {
        part: "places",
        class: "Place",
        date: "foundingDate",
        place: "country",
        category: "type",
        relation: "twinTown",
        thing: "landmark",
        second_date: "dissolutionDate",
    },
    Vocabulary {
        part: "events",
        class: "Event",
        date: "date",
        place: "place",
        category: "category",
        relation: "participant",
        thing: "result",
        second_date: "endDate",
    },
];

const WIKIDATA_PROPERTY: [(&str, &str); 6] = [
    ("birthDate", "P569"),
    ("deathDate", "P570"),
    ("foundingDate", "P571"),
    ("dissolutionDate", "P576"),
    ("date", "P585"),
    ("endDate", "P582"),
];

fn wkp_for(dbo: &str) -> &'static str {
    WIKIDATA_PROPERTY.iter().find(|(d, _)| *d == dbo).map(|(_, w)| *w).expect("mapped property")
}

/// A synthetic graph plus a 120-fact benchmark whose outcome classes are
/// known by construction (30 per class).
#[derive(Debug, Clone)]
pub struct SyntheticSuite {
    pub triples: Vec<ProvenancedTriple>,
    /// One N-Triples document per source graph, as (source, text).
    pub files: Vec<(String, String)>,
    /// JSON-Lines benchmark.
    pub benchmark: String,
    /// Constructed counts of C1..C4.
    pub expected: [usize; 4],
    pub entities: usize,
}

pub const SYNTHETIC_ENTITIES: usize = 60;
pub const PER_CLASS: usize = 30;

struct Entity {
    name: String,
    part: usize,
    date: String,
    mirror: Option<String>,
}

pub fn synthetic_suite(seed: u64) -> SyntheticSuite {
    let mut rng = rng(seed);
    let mut seen = HashSet::new();
    let names = unique_names(&mut rng, SYNTHETIC_ENTITIES, 2, &mut seen);
    let unknown = unique_names(&mut rng, PER_CLASS, 2, &mut seen);
    let hubs = unique_names(&mut rng, 24, 1, &mut seen);
    let titles = unique_names(&mut rng, PER_CLASS, 4, &mut seen);
    let things = unique_names(&mut rng, 40, 2, &mut seen);

    let dbr = |n: &str| iri(format!("{DBR}{n}"));
    let dbo = |n: &str| iri(format!("{DBO}{n}"));
    let mut dates = HashSet::new();
    let mut entities: Vec<Entity> = Vec::with_capacity(SYNTHETIC_ENTITIES);
    for (i, name) in names.iter().enumerate() {
        let date = loop {
            let d = format!("{}-{:02}-{:02}", rng.gen_range(1800..1990), rng.gen_range(1..=12), rng.gen_range(10..=27));
            if dates.insert(d.clone()) {
                break d;
            }
        };
        entities.push(Entity {
            name: name.clone(),
            part: if i < 30 {
                0
            } else if i < 45 {
                1
            } else {
                2
            },
            date,
            mirror: None,
        });
    }
    // every third entity is mirrored in the wikidata graph
    for (i, e) in entities.iter_mut().enumerate() {
        if i % 3 == 0 {
            e.mirror = Some(format!("Q{}", 1000 + i));
        }
    }

    let mut triples = Vec::new();
    let push = |out: &mut Vec<ProvenancedTriple>, t: Triple, src: &str| out.push(ProvenancedTriple::new(t, src));
    let mut second_dates = Vec::new();
    for (i, e) in entities.iter().enumerate() {
        let v = &VOCABULARY[e.part];
        let s = dbr(&e.name);
        push(&mut triples, triple(s.clone(), iri(RDF_TYPE), dbo(v.class)), "dbpedia");
        push(&mut triples, triple(s.clone(), iri(RDFS_LABEL), Term::literal(e.name.replace('_', " "))), "dbpedia");
        push(&mut triples, triple(s.clone(), dbo(v.date), Term::literal(e.date.clone())), "dbpedia");
        push(&mut triples, triple(s.clone(), dbo(v.place), dbr(&hubs[i % 12])), "dbpedia");
        push(&mut triples, triple(s.clone(), dbo(v.category), dbr(&hubs[12 + i % 12])), "dbpedia");
        let other = &entities[(i + 7) % entities.len()].name;
        push(&mut triples, triple(s.clone(), dbo(v.relation), dbr(other)), "dbpedia");
        push(&mut triples, triple(s.clone(), dbo(v.thing), dbr(&things[i % things.len()])), "dbpedia");
        push(
            &mut triples,
            triple(
                s.clone(),
                iri(format!("{YAGO}hasFamousTrait")),
                Term::literal(things[(i * 3) % things.len()].replace('_', " ")),
            ),
            "yago",
        );
        push(&mut triples, triple(s.clone(), iri(format!("{YAGO}isCitizenOf")), dbr(&hubs[(i * 5) % 24])), "yago");
        if let Some(q) = &e.mirror {
            let wq = iri(format!("{WKD}{q}"));
            let second = loop {
                let d =
                    format!("{}-{:02}-{:02}", rng.gen_range(1850..2020), rng.gen_range(1..=12), rng.gen_range(10..=27));
                if dates.insert(d.clone()) {
                    break d;
                }
            };
            push(&mut triples, triple(s.clone(), iri(OWL_SAME_AS), wq.clone()), "wikidata");
            push(
                &mut triples,
                triple(wq.clone(), iri(RDFS_LABEL), Term::literal(e.name.replace('_', " "))),
                "wikidata",
            );
            push(
                &mut triples,
                triple(wq.clone(), iri(format!("{WKP}{}", wkp_for(v.date))), Term::literal(e.date.clone())),
                "wikidata",
            );
            push(
                &mut triples,
                triple(wq.clone(), iri(format!("{WKP}{}", wkp_for(v.second_date))), Term::literal(second.clone())),
                "wikidata",
            );
            second_dates.push((i, second));
        }
    }
    for (dbo_name, wkp) in WIKIDATA_PROPERTY {
        push(&mut triples, triple(dbo(dbo_name), iri(OWL_EQUIVALENT_PROPERTY), iri(format!("{WKP}{wkp}"))), "wikidata");
    }

    let mut records = Vec::with_capacity(4 * PER_CLASS);
    let record = |t: &Triple, gold: &str, entity: &str, part: &str| {
        let o = match t.object() {
            Term::Iri { value } => json!({"o": value.as_str(), "o_kind": "iri"}),
            Term::Literal(l) => json!({"o": l.lexical(), "o_kind": "literal"}),
            Term::Blank { .. } => unreachable!("no blank objects generated"),
        };
        let mut v = json!({
            "s": t.subject().to_string(),
            "p": t.predicate().to_string(),
            "gold": gold,
            "entity": entity,
            "part": part,
        });
        v["o"] = o["o"].clone();
        v["o_kind"] = o["o_kind"].clone();
        v.to_string()
    };

    // C1: 20 stored facts verbatim, 10 only reachable through equivalence links
    let mut order: Vec<usize> = (0..SYNTHETIC_ENTITIES).collect();
    order.shuffle(&mut rng);
    for &i in order.iter().take(20) {
        let e = &entities[i];
        let v = &VOCABULARY[e.part];
        let p = [v.place, v.category, v.thing][i % 3];
        let t = triples
            .iter()
            .find(|t| t.triple.subject() == &dbr(&e.name) && t.triple.predicate() == &dbo(p))
            .expect("entity has the predicate")
            .triple
            .clone();
        records.push(record(&t, "correct", &e.name, v.part));
    }
    for (i, second) in second_dates.iter().take(10) {
        let e = &entities[*i];
        let v = &VOCABULARY[e.part];
        let t = triple(dbr(&e.name), dbo(v.second_date), Term::literal(second.clone()));
        records.push(record(&t, "correct", &e.name, v.part));
    }

    // C3: the stored date with its last digit changed
    let unmirrored: Vec<usize> = order.iter().copied().filter(|&i| entities[i].mirror.is_none()).collect();
    for &i in unmirrored.iter().take(PER_CLASS) {
        let e = &entities[i];
        let v = &VOCABULARY[e.part];
        let mut date = e.date.clone();
        let last = date.pop().expect("non-empty date").to_digit(10).expect("digit");
        date.push(char::from_digit(if last < 8 { last + 1 } else { last - 1 }, 10).expect("digit"));
        assert!(!dates.contains(&date) || date == e.date, "perturbed date collides");
        let t = triple(dbr(&e.name), dbo(v.date), Term::literal(date));
        records.push(record(&t, "erroneous", &e.name, v.part));
    }

    // C2 and C4: unknown entities, or a predicate and object the graph never uses
    let work = "notableWork";
    for (class, gold) in [(0usize, "correct"), (1, "erroneous")] {
        for j in 0..PER_CLASS {
            let title = &titles[j];
            if j % 2 == 0 {
                let name = &unknown[class * (PER_CLASS / 2) + j / 2];
                let t = triple(dbr(name), dbo(work), dbr(title));
                records.push(record(&t, gold, name, "other"));
            } else {
                let e = &entities[order[(class * PER_CLASS + j) % SYNTHETIC_ENTITIES]];
                let t = triple(dbr(&e.name), dbo(work), dbr(&format!("{title}_{gold}")));
                records.push(record(&t, gold, &e.name, VOCABULARY[e.part].part));
            }
        }
    }

    let mut files = Vec::new();
    for source in SOURCES {
        let mut text = String::new();
        for t in triples.iter().filter(|t| t.source == source) {
            text.push_str(&serialize_triple(&t.triple, None));
            text.push('\n');
        }
        files.push((source.to_owned(), text));
    }
    let distinct: BTreeSet<&String> = records.iter().collect();
    assert_eq!(distinct.len(), records.len(), "benchmark facts are distinct");
    let mut benchmark = records.join("\n");
    benchmark.push('\n');
    SyntheticSuite { triples, files, benchmark, expected: [PER_CLASS; 4], entities: SYNTHETIC_ENTITIES }
}

/// (part, facts, correct) for a collection with the published proportions.
pub const BENCHMARK_PARTS: [(&str, usize, usize); 3] =
    [("persons", 1000, 812), ("places", 500, 319), ("events", 500, 330)];

/// 2000 JSON-Lines records split across parts in the published proportions.
pub fn proportioned_benchmark() -> String {
    let predicates = ["birthDate", "birthPlace", "occupation", "country", "date", "spouse", "award"];
    let mut out = String::new();
    for (part, total, correct) in BENCHMARK_PARTS {
        for i in 0..total {
            let gold = if i < correct { "correct" } else { "erroneous" };
            let line = json!({
                "s": format!("dbr:{}_{i}", &part[..part.len() - 1]),
                "p": format!("dbo:{}", predicates[i % predicates.len()]),
                "o": format!("value {i}"),
                "o_kind": "literal",
                "gold": gold,
                "entity": format!("{part} {i}"),
                "part": part,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
    }
    out
}
