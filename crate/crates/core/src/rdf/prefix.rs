use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use super::term::{has_scheme, Iri};

#[derive(Debug, Error)]
pub enum PrefixError {
    #[error("invalid prefix label {0:?}")]
    Label(String),
    #[error("namespace {0:?} for prefix {1:?} is not an absolute IRI")]
    Namespace(String, String),
    #[error("{path}:{line}: expected `prefix=namespace`")]
    Syntax { path: String, line: usize },
    #[error("reading prefix file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
pub const OWL_EQUIVALENT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#equivalentProperty";
pub const OWL_EQUIVALENT_CLASS: &str = "http://www.w3.org/2002/07/owl#equivalentClass";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

const DEFAULT_BINDINGS: &[(&str, &str)] = &[
    ("dbr", "http://dbpedia.org/resource/"),
    ("dbo", "http://dbpedia.org/ontology/"),
    ("dbp", "http://dbpedia.org/property/"),
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("owl", OWL),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("yago", "http://yago-knowledge.org/resource/"),
    ("wkd", "http://www.wikidata.org/entity/"),
    ("wkp", "http://www.wikidata.org/prop/direct/"),
    ("xsd", XSD),
];

/// Prefix label to namespace bindings used to expand and compact prefixed names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let mut map = Self::empty();
        for (label, ns) in DEFAULT_BINDINGS {
            map.entries.insert((*label).to_owned(), (*ns).to_owned());
        }
        map
    }
}

pub(crate) fn is_prefix_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
        _ => false,
    }
}

impl PrefixMap {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Binds `label` to `namespace`, replacing any previous binding.
    pub fn insert(&mut self, label: &str, namespace: &str) -> Result<(), PrefixError> {
        if !is_prefix_label(label) {
            return Err(PrefixError::Label(label.to_owned()));
        }
        if Iri::new(namespace).is_err() || !has_scheme(namespace) {
            return Err(PrefixError::Namespace(namespace.to_owned(), label.to_owned()));
        }
        self.entries.insert(label.to_owned(), namespace.to_owned());
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.entries.get(label).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands `pfx:Local` to `namespace(pfx) + "Local"`.
    pub fn expand(&self, prefixed: &str) -> Option<String> {
        let (label, local) = prefixed.split_once(':')?;
        self.get(label).map(|ns| format!("{ns}{local}"))
    }

    /// Shortest `pfx:local` form of `iri` whose local part can be read back
    /// unambiguously, if any namespace matches.
    pub fn compact(&self, iri: &str) -> Option<String> {
        self.entries
            .iter()
            .filter_map(|(label, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_safe_local(local).then(|| format!("{label}:{local}"))
            })
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
    }

    /// Overlays `key=value` bindings from a config file onto the defaults.
    /// Blank lines and `#` comments are ignored.
    pub fn from_file(path: &Path) -> Result<Self, PrefixError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PrefixError::Io { path: path.display().to_string(), source })?;
        let mut map = Self::default();
        map.merge_config(&text, &path.display().to_string())?;
        Ok(map)
    }

    pub fn merge_config(&mut self, text: &str, origin: &str) -> Result<(), PrefixError> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, ns) =
                line.split_once('=').ok_or_else(|| PrefixError::Syntax { path: origin.to_owned(), line: idx + 1 })?;
            self.insert(label.trim(), ns.trim())?;
        }
        Ok(())
    }
}

/// A local part survives a compact/expand round trip through the line parser.
fn is_safe_local(local: &str) -> bool {
    !local.is_empty()
        && !local.ends_with('.')
        && !local
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '\\' | '#' | '^'))
}
