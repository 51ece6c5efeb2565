//! Equivalence classes over IRIs induced by `owl:sameAs`,
//! `owl:equivalentProperty` and `owl:equivalentClass`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;

use serde::Serialize;

use crate::rdf::prefix::{OWL_EQUIVALENT_CLASS, OWL_EQUIVALENT_PROPERTY, OWL_SAME_AS};
use crate::rdf::{Iri, Term, Triple};

/// Disjoint-set forest with union by rank and path compression.
#[derive(Debug, Clone)]
pub struct UnionFind<T> {
    index: HashMap<T, usize>,
    items: Vec<T>,
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl<T> Default for UnionFind<T> {
    fn default() -> Self {
        Self { index: HashMap::new(), items: Vec::new(), parent: Vec::new(), rank: Vec::new() }
    }
}

impl<T: Clone + Eq + Hash + Ord> UnionFind<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: &T) -> usize {
        if let Some(&id) = self.index.get(item) {
            return id;
        }
        let id = self.items.len();
        self.index.insert(item.clone(), id);
        self.items.push(item.clone());
        self.parent.push(id);
        self.rank.push(0);
        id
    }

    pub fn contains(&self, item: &T) -> bool {
        self.index.contains_key(item)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn root(&mut self, mut id: usize) -> usize {
        let mut top = id;
        while self.parent[top] != top {
            top = self.parent[top];
        }
        while self.parent[id] != top {
            let next = self.parent[id];
            self.parent[id] = top;
            id = next;
        }
        top
    }

    pub fn union(&mut self, a: &T, b: &T) {
        let ra = self.insert(a);
        let rb = self.insert(b);
        let (ra, rb) = (self.root(ra), self.root(rb));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    pub fn same(&mut self, a: &T, b: &T) -> bool {
        if a == b {
            return true;
        }
        match (self.index.get(a).copied(), self.index.get(b).copied()) {
            (Some(x), Some(y)) => self.root(x) == self.root(y),
            _ => false,
        }
    }

    /// All classes, each sorted, in order of their smallest member.
    pub fn classes(&mut self) -> Vec<Vec<T>> {
        let mut groups: HashMap<usize, Vec<T>> = HashMap::new();
        for id in 0..self.items.len() {
            let root = self.root(id);
            groups.entry(root).or_default().push(self.items[id].clone());
        }
        let mut classes: Vec<Vec<T>> = groups
            .into_values()
            .map(|mut members| {
                members.sort();
                members
            })
            .collect();
        classes.sort();
        classes
    }

    /// Maps every member to the smallest member of its class.
    pub fn representatives(&mut self) -> HashMap<T, T> {
        let mut out = HashMap::with_capacity(self.items.len());
        for class in self.classes() {
            let rep = class[0].clone();
            for member in class {
                out.insert(member, rep.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceKind {
    Resource,
    Property,
    Class,
}

impl EquivalenceKind {
    pub fn of_predicate(predicate: &Term) -> Option<Self> {
        match predicate.as_iri()?.as_str() {
            OWL_SAME_AS => Some(Self::Resource),
            OWL_EQUIVALENT_PROPERTY => Some(Self::Property),
            OWL_EQUIVALENT_CLASS => Some(Self::Class),
            _ => None,
        }
    }
}

/// Frozen partition of IRIs into equivalence classes, one partition per kind.
/// Literals are never merged: they are equal only by lexical form.
#[derive(Debug, Clone, Default)]
pub struct EquivalenceIndex {
    resources: HashMap<Iri, Iri>,
    properties: HashMap<Iri, Iri>,
    classes: HashMap<Iri, Iri>,
    diagnostics: Vec<String>,
}

impl EquivalenceIndex {
    /// Builds the closure from equivalence triples; other triples are ignored.
    ///
    /// Property links are applied first, then class links, then `owl:sameAs`.
    /// A link touching an IRI already claimed by another kind is dropped and
    /// reported in [`EquivalenceIndex::diagnostics`].
    pub fn from_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let mut links: Vec<(EquivalenceKind, &Term, &Term)> = triples
            .into_iter()
            .filter_map(|t| EquivalenceKind::of_predicate(t.predicate()).map(|k| (k, t.subject(), t.object())))
            .collect();
        links.sort_by_key(|(kind, _, _)| match kind {
            EquivalenceKind::Property => 0,
            EquivalenceKind::Class => 1,
            EquivalenceKind::Resource => 2,
        });

        let mut diagnostics = Vec::new();
        let mut claimed: HashMap<Iri, EquivalenceKind> = HashMap::new();
        let mut forests: HashMap<EquivalenceKind, UnionFind<Iri>> = HashMap::new();
        for (kind, a, b) in links {
            let (Some(a), Some(b)) = (a.as_iri(), b.as_iri()) else {
                diagnostics.push(format!("{kind:?} link between non-IRI terms {a} and {b} ignored"));
                continue;
            };
            let conflict = [a, b].into_iter().find_map(|x| claimed.get(x).filter(|k| **k != kind).map(|k| (x, *k)));
            if let Some((iri, other)) = conflict {
                diagnostics.push(format!("{kind:?} link {a} ~ {b} ignored: {iri} is already a {other:?}"));
                continue;
            }
            claimed.insert(a.clone(), kind);
            claimed.insert(b.clone(), kind);
            forests.entry(kind).or_default().union(a, b);
        }

        let mut freeze =
            |kind| forests.remove(&kind).map(|mut uf: UnionFind<Iri>| uf.representatives()).unwrap_or_default();
        Self {
            resources: freeze(EquivalenceKind::Resource),
            properties: freeze(EquivalenceKind::Property),
            classes: freeze(EquivalenceKind::Class),
            diagnostics,
        }
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    fn map(&self, kind: EquivalenceKind) -> &HashMap<Iri, Iri> {
        match kind {
            EquivalenceKind::Resource => &self.resources,
            EquivalenceKind::Property => &self.properties,
            EquivalenceKind::Class => &self.classes,
        }
    }

    /// Representative of an IRI within one partition (itself if unlinked).
    pub fn representative_in(&self, kind: EquivalenceKind, iri: &Iri) -> Iri {
        self.map(kind).get(iri).cloned().unwrap_or_else(|| iri.clone())
    }

    /// Key for a subject/object position: resource or class representative
    /// for IRIs, lexical form for literals, the node itself for blanks.
    pub fn node_key(&self, term: &Term) -> Term {
        match term {
            Term::Iri { value } => {
                let rep = self.resources.get(value).or_else(|| self.classes.get(value)).unwrap_or(value);
                Term::from(rep.clone())
            }
            Term::Literal(_) => term.lexical_key(),
            Term::Blank { .. } => term.clone(),
        }
    }

    /// Key for a predicate position.
    pub fn predicate_key(&self, term: &Term) -> Term {
        match term.as_iri() {
            Some(iri) => Term::from(self.representative_in(EquivalenceKind::Property, iri)),
            None => term.clone(),
        }
    }

    pub fn equivalent_nodes(&self, a: &Term, b: &Term) -> bool {
        self.node_key(a) == self.node_key(b)
    }

    /// Sorted classes with at least two members.
    pub fn classes(&self, kind: EquivalenceKind) -> Vec<Vec<Iri>> {
        let mut groups: HashMap<&Iri, BTreeSet<Iri>> = HashMap::new();
        for (member, rep) in self.map(kind) {
            groups.entry(rep).or_default().insert(member.clone());
        }
        let mut out: Vec<Vec<Iri>> =
            groups.into_values().filter(|s| s.len() > 1).map(|s| s.into_iter().collect()).collect();
        out.sort();
        out
    }

    pub fn members(&self) -> HashSet<&Iri> {
        self.resources.keys().chain(self.properties.keys()).chain(self.classes.keys()).collect()
    }
}
