//! RDF terms, triples, prefix maps, and the tolerant line parser.

mod parser;
pub mod prefix;
mod term;

pub use parser::{parse_triples, serialize_triple, Diagnostic, ParseReport, Severity};
pub use prefix::{PrefixError, PrefixMap};
pub use term::{Iri, Literal, Term, TermError, Triple};
