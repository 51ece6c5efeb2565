//! Candidate retrieval by rules A, B and C, then verbalization, encoding and
//! cosine ranking of the candidates against the fact.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::backend::{Backend, BackendError};
use crate::encoder::{cosine, EncodeError, EncoderHandle};
use crate::par;
use crate::rdf::Triple;
use crate::store::{PairKind, ProvenancedTriple};
use crate::verbalize::{LabelSource, Verbalizer};

pub const DEFAULT_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    A,
    B,
    C,
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rule::A => "A",
            Rule::B => "B",
            Rule::C => "C",
        })
    }
}

/// Why a candidate was retrieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Via {
    Equivalent,
    SamePredicate,
    SameObject,
    Entity,
}

impl From<PairKind> for Via {
    fn from(kind: PairKind) -> Self {
        match kind {
            PairKind::SamePredicate => Via::SamePredicate,
            PairKind::SameObject => Via::SameObject,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub triple: ProvenancedTriple,
    pub via: Via,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateSet {
    pub rule: Rule,
    pub candidates: Vec<Candidate>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedMatch {
    pub triple: ProvenancedTriple,
    pub via: Via,
    pub score: f64,
    pub sentence: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Timings {
    pub candidate_retrieval: Duration,
    pub encoding: Duration,
    pub ranking: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.candidate_retrieval + self.encoding + self.ranking
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationResult {
    pub fact: Triple,
    pub fact_sentence: String,
    pub rule: Rule,
    pub matches: Vec<RankedMatch>,
    pub candidate_count: usize,
    pub truncated: bool,
    pub backend: String,
    #[serde(skip)]
    pub timings: Timings,
}

impl ValidationResult {
    pub fn best(&self) -> Option<&RankedMatch> {
        self.matches.first()
    }
}

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("fact has a blank-node subject; an IRI entity is required: {0}")]
    BlankSubject(Box<Triple>),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("{phase}: {source}")]
    Backend {
        phase: &'static str,
        #[source]
        source: BackendError,
    },
    #[error("encoding: {0}")]
    Encode(#[from] EncodeError),
}

/// Runs the validation pipeline with a configurable verbalizer.
#[derive(Debug, Clone, Default)]
pub struct Validator {
    verbalizer: Verbalizer,
}

fn default_validator() -> &'static Validator {
    static V: OnceLock<Validator> = OnceLock::new();
    V.get_or_init(Validator::default)
}

impl Validator {
    pub fn new(verbalizer: Verbalizer) -> Self {
        Self { verbalizer }
    }

    pub fn verbalizer(&self) -> &Verbalizer {
        &self.verbalizer
    }

    /// Rules tried strictly in order A, B, C; the first that yields anything wins.
    pub fn find_candidates(&self, fact: &Triple, backend: &dyn Backend) -> Result<CandidateSet, ValidateError> {
        if fact.subject().is_blank() {
            return Err(ValidateError::BlankSubject(Box::new(fact.clone())));
        }
        let phase = |phase| move |source| ValidateError::Backend { phase, source };
        if let Some(t) = backend.equivalent_triple(fact).map_err(phase("rule A"))? {
            return Ok(CandidateSet {
                rule: Rule::A,
                candidates: vec![Candidate { triple: t, via: Via::Equivalent }],
                truncated: false,
            });
        }
        let pairs = backend.pair_candidates(fact).map_err(phase("rule B"))?;
        if !pairs.is_empty() {
            return Ok(CandidateSet {
                rule: Rule::B,
                candidates: pairs.into_iter().map(|(triple, kind)| Candidate { triple, via: kind.into() }).collect(),
                truncated: false,
            });
        }
        let batch = backend.entity_triples(fact.subject()).map_err(phase("rule C"))?;
        Ok(CandidateSet {
            rule: Rule::C,
            candidates: batch.triples.into_iter().map(|triple| Candidate { triple, via: Via::Entity }).collect(),
            truncated: batch.truncated,
        })
    }

    fn sentence(&self, t: &Triple, labels: Option<&dyn LabelSource>) -> String {
        let s = self.verbalizer.convert_triple(t, labels).sentence;
        if s.trim().is_empty() {
            t.canonical()
        } else {
            s
        }
    }

    /// Top-`k` candidates by cosine similarity to the fact; ties broken by
    /// canonical serialization, then source.
    pub fn rank(
        &self,
        fact: &Triple,
        cands: &CandidateSet,
        enc: &EncoderHandle,
        k: usize,
        labels: Option<&dyn LabelSource>,
    ) -> Result<Vec<RankedMatch>, ValidateError> {
        let fact_sentence = self.sentence(fact, labels);
        Ok(self.rank_timed(&fact_sentence, cands, enc, k, labels)?.0)
    }

    fn rank_timed(
        &self,
        fact_sentence: &str,
        cands: &CandidateSet,
        enc: &EncoderHandle,
        k: usize,
        labels: Option<&dyn LabelSource>,
    ) -> Result<(Vec<RankedMatch>, Duration, Duration), ValidateError> {
        if k == 0 {
            return Err(ValidateError::ZeroK);
        }
        if cands.candidates.is_empty() {
            return Ok((Vec::new(), Duration::ZERO, Duration::ZERO));
        }
        let started = Instant::now();
        let mut sentences = Vec::with_capacity(cands.candidates.len() + 1);
        sentences.push(fact_sentence.to_owned());
        sentences.extend(cands.candidates.iter().map(|c| self.sentence(&c.triple.triple, labels)));
        let embeddings = enc.encode(&sentences)?;
        let encoding = started.elapsed();

        let started = Instant::now();
        let (fact_vec, cand_vecs) = embeddings.split_first().expect("batch has the fact");
        let mut scored = Vec::with_capacity(cand_vecs.len());
        for (idx, v) in cand_vecs.iter().enumerate() {
            let t = &cands.candidates[idx].triple;
            scored.push((cosine(fact_vec, v)?, t.triple.canonical(), idx));
        }
        scored.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then_with(|| a.1.cmp(&b.1))
                .then_with(|| cands.candidates[a.2].triple.source.cmp(&cands.candidates[b.2].triple.source))
        });
        scored.truncate(k);
        let matches = scored
            .into_iter()
            .map(|(score, _, idx)| {
                let c = &cands.candidates[idx];
                RankedMatch {
                    triple: c.triple.clone(),
                    via: c.via,
                    score,
                    sentence: std::mem::take(&mut sentences[idx + 1]),
                }
            })
            .collect();
        Ok((matches, encoding, started.elapsed()))
    }

    pub fn validate(
        &self,
        fact: &Triple,
        backend: &dyn Backend,
        enc: &EncoderHandle,
        k: usize,
    ) -> Result<ValidationResult, ValidateError> {
        if k == 0 {
            return Err(ValidateError::ZeroK);
        }
        let started = Instant::now();
        let cands = self.find_candidates(fact, backend)?;
        let candidate_retrieval = started.elapsed();
        let labels = backend.labels();
        let fact_sentence = self.sentence(fact, labels);
        let (matches, encoding, ranking) = self.rank_timed(&fact_sentence, &cands, enc, k, labels)?;
        Ok(ValidationResult {
            fact: fact.clone(),
            fact_sentence,
            rule: cands.rule,
            matches,
            candidate_count: cands.candidates.len(),
            truncated: cands.truncated,
            backend: backend.name().to_owned(),
            timings: Timings { candidate_retrieval, encoding, ranking },
        })
    }

    /// Validates every fact, fanning out over `parallelism` workers. Output
    /// order matches input order and does not depend on `parallelism`.
    pub fn validate_batch(
        &self,
        facts: &[Triple],
        backend: &dyn Backend,
        enc: &EncoderHandle,
        k: usize,
        parallelism: usize,
    ) -> Vec<Result<ValidationResult, ValidateError>> {
        par::map_with_threads(facts, parallelism.max(1), |fact| self.validate(fact, backend, enc, k))
    }
}

pub fn find_candidates(fact: &Triple, backend: &dyn Backend) -> Result<CandidateSet, ValidateError> {
    default_validator().find_candidates(fact, backend)
}

pub fn rank(
    fact: &Triple,
    cands: &CandidateSet,
    enc: &EncoderHandle,
    k: usize,
    labels: Option<&dyn LabelSource>,
) -> Result<Vec<RankedMatch>, ValidateError> {
    default_validator().rank(fact, cands, enc, k, labels)
}

pub fn validate(
    fact: &Triple,
    backend: &dyn Backend,
    enc: &EncoderHandle,
    k: usize,
) -> Result<ValidationResult, ValidateError> {
    default_validator().validate(fact, backend, enc, k)
}

pub fn validate_batch(
    facts: &[Triple],
    backend: &dyn Backend,
    enc: &EncoderHandle,
    k: usize,
    parallelism: usize,
) -> Vec<Result<ValidationResult, ValidateError>> {
    default_validator().validate_batch(facts, backend, enc, k, parallelism)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::LocalBackend;
    use crate::encoder::DEFAULT_DIMENSION;
    use crate::rdf::Term;
    use crate::store::KnowledgeGraph;

    const DBR: &str = "http://dbpedia.org/resource/";
    const DBO: &str = "http://dbpedia.org/ontology/";

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(Term::iri(format!("{DBR}{s}")).unwrap(), Term::iri(format!("{DBO}{p}")).unwrap(), o).unwrap()
    }

    fn r(name: &str) -> Term {
        Term::iri(format!("{DBR}{name}")).unwrap()
    }

    fn backend() -> LocalBackend {
        let facts = vec![
            t("Aristophanes", "genre", r("Comedy")),
            t("Gorgias", "birthDate", Term::literal("1883-05-13")),
            t("Gorgias", "birthPlace", r("Leontini")),
            t("Aristophanes", "author", r("Lysistrata")),
            t("Pericles", "rank", Term::literal("Strategos")),
            t("Pericles", "spouse", r("Aspasia")),
        ];
        LocalBackend::new(KnowledgeGraph::from_triples(facts.into_iter().map(|t| ProvenancedTriple::new(t, "dbpedia"))))
    }

    #[test]
    fn rules_in_order() {
        let b = backend();
        let a = find_candidates(&t("Aristophanes", "genre", r("Comedy")), &b).unwrap();
        assert_eq!((a.rule, a.candidates.len()), (Rule::A, 1));
        let sp = find_candidates(&t("Gorgias", "birthDate", Term::literal("1886-05-13")), &b).unwrap();
        assert_eq!(sp.rule, Rule::B);
        assert_eq!(sp.candidates[0].via, Via::SamePredicate);
        let so = find_candidates(&t("Aristophanes", "notableWork", r("Lysistrata")), &b).unwrap();
        assert_eq!(so.rule, Rule::B);
        assert_eq!(so.candidates[0].via, Via::SameObject);
        let c = find_candidates(&t("Pericles", "office", r("Strategos")), &b).unwrap();
        assert_eq!((c.rule, c.candidates.len()), (Rule::C, 2));
        let none = find_candidates(&t("Nobody", "office", r("Strategos")), &b).unwrap();
        assert_eq!((none.rule, none.candidates.len()), (Rule::C, 0));
    }

    #[test]
    fn validate_scores_and_orders() {
        let b = backend();
        let enc = EncoderHandle::fallback(DEFAULT_DIMENSION);
        let res = validate(&t("Aristophanes", "genre", r("Comedy")), &b, &enc, 3).unwrap();
        assert_eq!(res.rule, Rule::A);
        assert_eq!(res.matches.len(), 1);
        assert_eq!(res.matches[0].score, 1.0);
        assert_eq!(res.fact_sentence, "Aristophanes genre Comedy");

        let fact = t("Pericles", "office", r("Strategos"));
        let k3 = validate(&fact, &b, &enc, 3).unwrap();
        let k1 = validate(&fact, &b, &enc, 1).unwrap();
        assert_eq!(k3.matches.len(), 2);
        assert!(k3.matches[0].score >= k3.matches[1].score);
        assert_eq!(k1.matches[..], k3.matches[..1]);

        let empty = validate(&t("Nobody", "x", r("Y")), &b, &enc, 3).unwrap();
        assert!(empty.matches.is_empty());
        assert!(matches!(validate(&fact, &b, &enc, 0), Err(ValidateError::ZeroK)));
    }

    #[test]
    fn blank_subject_rejected_in_slot() {
        let b = backend();
        let enc = EncoderHandle::fallback(64);
        let blank = Triple::new(Term::blank("x").unwrap(), Term::iri(format!("{DBO}p")).unwrap(), r("A")).unwrap();
        let facts = vec![t("Aristophanes", "genre", r("Comedy")), blank, t("Pericles", "office", r("Strategos"))];
        let out = validate_batch(&facts, &b, &enc, 3, 2);
        assert_eq!(out.len(), 3);
        assert!(out[0].is_ok() && out[2].is_ok());
        assert!(matches!(out[1], Err(ValidateError::BlankSubject(_))));
        assert!(validate_batch(&[], &b, &enc, 3, 4).is_empty());
    }
}
