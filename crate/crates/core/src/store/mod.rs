//! Local knowledge-graph backend: N-Triples loading with provenance,
//! equivalence closure and entity-anchored lookups.

pub mod equivalence;
mod graph;

pub use equivalence::{EquivalenceIndex, EquivalenceKind, UnionFind};
pub use graph::{
    default_source_name, read_manifest, KnowledgeGraph, LoadDiagnostic, PairKind, ProvenancedTriple, StoreError,
};
