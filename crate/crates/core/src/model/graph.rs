use indexmap::IndexSet;

use super::{Iri, PrefixMap, Subject, Term, Triple};

/// A duplicate-free set of triples that remembers insertion order.
///
/// Iteration always follows insertion order, which keeps query results and
/// serialized output stable between runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: IndexSet<Triple>,
    pub prefixes: PrefixMap,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `triple`, returning false when it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    /// All triples agreeing with every non-wildcard (`Some`) position, in
    /// insertion order. Terms are compared exactly.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&'a Term>,
        predicate: Option<&'a Term>,
        object: Option<&'a Term>,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples.iter().filter(move |t| {
            subject.is_none_or(|s| s.subject_eq(&t.subject))
                && predicate.is_none_or(|p| p.as_iri() == Some(&t.predicate))
                && object.is_none_or(|o| *o == t.object)
        })
    }

    /// Objects of `(subject, predicate, *)`.
    pub fn objects<'a>(&'a self, subject: &'a Subject, predicate: &'a Iri) -> impl Iterator<Item = &'a Term> + 'a {
        self.triples.iter().filter(move |t| t.subject == *subject && t.predicate == *predicate).map(|t| &t.object)
    }

    pub fn has_blank_nodes(&self) -> bool {
        self.triples.iter().any(|t| matches!(t.subject, Subject::Blank(_)) || matches!(t.object, Term::Blank(_)))
    }

    /// Inserts every triple of `other` after the existing ones.
    pub fn extend_from(&mut self, other: &Graph) {
        for t in other.iter() {
            self.insert(t.clone());
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = indexmap::set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}
