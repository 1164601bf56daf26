use std::fmt;

use crate::model::{vocab, Iri, PrefixMap, Term};

use super::QueryError;

/// A query variable, stored without its leading `?`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Result<Self, QueryError> {
        let name = name.into();
        let mut chars = name.chars();
        let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if valid {
            Ok(Variable(name))
        } else {
            Err(QueryError::InvalidVariable(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermPattern {
    Var(Variable),
    Term(Term),
}

impl TermPattern {
    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        }
    }
}

impl From<Variable> for TermPattern {
    fn from(v: Variable) -> Self {
        TermPattern::Var(v)
    }
}

impl<T: Into<Term>> From<T> for TermPattern {
    fn from(t: T) -> Self {
        TermPattern::Term(t.into())
    }
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Var(v) => v.fmt(f),
            TermPattern::Term(t) => t.fmt(f),
        }
    }
}

/// Invariant: the subject is never a literal and the predicate is an IRI or
/// a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<TermPattern>,
        predicate: impl Into<TermPattern>,
        object: impl Into<TermPattern>,
    ) -> Result<Self, QueryError> {
        let (subject, predicate, object) = (subject.into(), predicate.into(), object.into());
        if matches!(subject, TermPattern::Term(Term::Literal(_))) {
            return Err(QueryError::BadPattern("literal in subject position"));
        }
        if matches!(predicate, TermPattern::Term(ref t) if t.as_iri().is_none()) {
            return Err(QueryError::BadPattern("predicate must be an IRI or a variable"));
        }
        Ok(TriplePattern { subject, predicate, object })
    }

    pub fn positions(&self) -> [&TermPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.predicate {
            TermPattern::Term(Term::Iri(i)) if i.as_str() == vocab::RDF_TYPE => {
                write!(f, "{} a {}", self.subject, self.object)
            }
            p => write!(f, "{} {p} {}", self.subject, self.object),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternGroup {
    Bgp(Vec<TriplePattern>),
    Union(Box<PatternGroup>, Box<PatternGroup>),
    /// Members joined conjunctively, left to right.
    Group(Vec<PatternGroup>),
}

impl PatternGroup {
    pub fn union(left: PatternGroup, right: PatternGroup) -> Self {
        PatternGroup::Union(Box::new(left), Box::new(right))
    }

    /// Left-associative union of `branches`; `None` when empty.
    pub fn union_all(branches: impl IntoIterator<Item = PatternGroup>) -> Option<Self> {
        branches.into_iter().reduce(PatternGroup::union)
    }

    /// Number of nested UNION levels on the deepest path.
    pub fn union_depth(&self) -> usize {
        match self {
            PatternGroup::Bgp(_) => 0,
            PatternGroup::Union(l, r) => 1 + l.union_depth().max(r.union_depth()),
            PatternGroup::Group(items) => items.iter().map(PatternGroup::union_depth).max().unwrap_or(0),
        }
    }

    /// Operands of the top-level UNION chain, in order. A non-union group is
    /// its own single branch.
    pub fn union_branches(&self) -> Vec<&PatternGroup> {
        match self {
            PatternGroup::Union(l, r) => {
                let mut out = l.union_branches();
                out.extend(r.union_branches());
                out
            }
            other => vec![other],
        }
    }

    /// Variables in first-appearance order.
    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut Vec<Variable>) {
        match self {
            PatternGroup::Bgp(patterns) => {
                for v in patterns.iter().flat_map(|p| p.positions()).filter_map(TermPattern::as_var) {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
            PatternGroup::Union(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
            PatternGroup::Group(items) => items.iter().for_each(|g| g.collect_variables(out)),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternGroup::Bgp(patterns) => {
                let body: Vec<String> = patterns.iter().map(|p| p.to_string()).collect();
                write!(f, "{{ {} }}", body.join(" . "))
            }
            PatternGroup::Union(l, r) => {
                l.write(f)?;
                f.write_str(" UNION ")?;
                r.write(f)
            }
            PatternGroup::Group(items) => {
                f.write_str("{ ")?;
                for item in items {
                    item.write(f)?;
                    f.write_str(" ")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<Variable>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAst {
    pub prefixes: PrefixMap,
    pub projection: Projection,
    pub where_clause: PatternGroup,
}

impl QueryAst {
    /// Projected variables; for `SELECT *`, every variable of the pattern.
    pub fn header(&self) -> Vec<Variable> {
        match &self.projection {
            Projection::All => self.where_clause.variables(),
            Projection::Vars(vars) => vars.clone(),
        }
    }

    pub fn prefix(&self, name: &str) -> Option<&Iri> {
        self.prefixes.get(name)
    }
}

/// Query text with every IRI written out in full. Parsing it back yields the
/// same tree.
impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, ns) in self.prefixes.iter() {
            writeln!(f, "PREFIX {name}: {ns}")?;
        }
        f.write_str("SELECT")?;
        match &self.projection {
            Projection::All => f.write_str(" *")?,
            Projection::Vars(vars) => {
                for v in vars {
                    write!(f, " {v}")?;
                }
            }
        }
        f.write_str(" WHERE ")?;
        match &self.where_clause {
            union @ PatternGroup::Union(..) => {
                f.write_str("{ ")?;
                union.write(f)?;
                f.write_str(" }")
            }
            other => other.write(f),
        }
    }
}
