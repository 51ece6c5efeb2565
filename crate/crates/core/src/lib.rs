//! Validation of LLM-produced RDF facts against knowledge graphs.
//!
//! A fact is matched against a graph by three candidate rules tried in
//! order (an equivalent triple; triples sharing the subject and either the
//! predicate or the object; every triple of the subject entity). Candidates
//! and the fact are verbalized into short sentences, embedded, and ranked by
//! cosine similarity; the top-k matches are returned with their provenance.

// ureq::Error is large; request closures hand it straight to the retry loop.
#![allow(clippy::result_large_err)]

pub mod backend;
pub mod benchmark;
pub mod encoder;
pub mod llm;
pub mod par;
pub mod rdf;
pub mod remote;
pub mod store;
pub mod validator;
pub mod verbalize;

pub use backend::{Backend, BackendError, CandidateBatch, FactServiceBackend, LocalBackend, SparqlBackend};
pub use encoder::{cosine, Embedding, EncodeError, EncoderHandle};
pub use rdf::{parse_triples, serialize_triple, Iri, Literal, PrefixMap, Term, Triple};
pub use store::{KnowledgeGraph, ProvenancedTriple};
pub use validator::{
    find_candidates, rank, validate, validate_batch, CandidateSet, RankedMatch, Rule, ValidateError, ValidationResult,
    Validator,
};
