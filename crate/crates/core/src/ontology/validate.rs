use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{vocabulary_for, Class, Datatype, Property, Range, Vocabulary};
use crate::model::{parse_date, vocab, Graph, Iri, Subject, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub subject: Subject,
    pub message: String,
}

/// Findings sorted by subject, then code. Ties keep discovery order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{} {} {}: {}", finding.severity, finding.code, finding.subject, finding.message)?;
        }
        Ok(())
    }
}

/// Checks `g` against the vocabulary under `base`. Domain and range checks
/// only fire for nodes that carry an explicit, different class type.
pub fn validate(g: &Graph, base: &Iri, strict: bool) -> ValidationReport {
    let v = vocabulary_for(base);
    let mut out = Vec::new();
    let mut err = |code, subject: &Subject, message: String| {
        out.push(Finding { severity: Severity::Error, code, subject: subject.clone(), message });
    };

    let types = explicit_types(g, &v);
    for (node, classes) in &types {
        if classes.len() > 1 {
            let names: Vec<_> = classes.iter().map(|c| c.name()).collect();
            err("conflicting-type", node, format!("typed as {}", names.join(" and ")));
        }
    }
    let typed_as = |t: &Term| t.to_subject().and_then(|s| types.get(&s));

    for t in g.iter() {
        let Some(p) = v.property_of(&t.predicate) else {
            continue;
        };
        let name = p.name();
        if let Some(classes) = types.get(&t.subject) {
            if !classes.contains(&p.domain()) {
                err("domain-violation", &t.subject, format!("{name} expects a {} subject", p.domain().name()));
            }
        }
        match (p.range(), &t.object) {
            (Range::Class(c), Term::Literal(l)) => {
                err("range-violation", &t.subject, format!("{name} expects a {} resource, found literal {l}", c.name()))
            }
            (Range::Class(c), object) => {
                if typed_as(object).is_some_and(|classes| !classes.contains(&c)) {
                    err("range-violation", &t.subject, format!("{name} expects a {}, found {object}", c.name()));
                }
            }
            (Range::Datatype(_), object) if !object.is_literal() => {
                err("range-violation", &t.subject, format!("{name} expects a literal, found {object}"))
            }
            (Range::Datatype(Datatype::Date), Term::Literal(l)) if parse_date(l.lexical()).is_none() => {
                err("invalid-date", &t.subject, format!("{name} value {:?} is not a YYYY-MM-DD date", l.lexical()))
            }
            _ => {}
        }
    }

    for cycle in subdomain_cycles(g, &v) {
        let members: Vec<String> = cycle.iter().map(|s| s.to_string()).collect();
        err("subdomain-cycle", &cycle[0], format!("hasSubDomain cycle through {}", members.join(", ")));
    }

    let inverse_severity = if strict { Severity::Error } else { Severity::Warning };
    for (t, missing) in missing_inverses(g, &v) {
        out.push(Finding {
            severity: inverse_severity,
            code: "missing-inverse",
            subject: t.subject.clone(),
            message: format!("{} {} has no matching {}", t.predicate.local_name(), t.object, missing.name()),
        });
    }

    let has = |s: &Subject, p: Property| g.objects(s, &v.property_iri(p)).next().is_some();
    let mut warn = |code, subject: &Subject, message: &str| {
        out.push(Finding { severity: Severity::Warning, code, subject: subject.clone(), message: message.into() });
    };
    for (node, classes) in &types {
        if classes.contains(&Class::Documents) {
            if !has(node, Property::DocTitle) {
                warn("document-missing-title", node, "document has no docTitle");
            }
            if !has(node, Property::DocUri) {
                warn("document-missing-uri", node, "document has no docURI");
            }
        }
        if classes.contains(&Class::Web) && !has(node, Property::Owner) {
            warn("web-missing-owner", node, "web has no owner");
        }
    }

    out.sort_by(|a, b| (subject_key(&a.subject), a.code).cmp(&(subject_key(&b.subject), b.code)));
    ValidationReport { findings: out }
}

fn subject_key(s: &Subject) -> String {
    match s {
        Subject::Iri(i) => i.as_str().to_string(),
        Subject::Blank(b) => b.to_string(),
    }
}

/// Explicit vocabulary classes per node, in first-appearance order.
fn explicit_types(g: &Graph, v: &Vocabulary) -> indexmap::IndexMap<Subject, BTreeSet<Class>> {
    let mut types: indexmap::IndexMap<Subject, BTreeSet<Class>> = indexmap::IndexMap::new();
    for t in g.iter() {
        if t.predicate.as_str() != vocab::RDF_TYPE {
            continue;
        }
        if let Some(class) = t.object.as_iri().and_then(|o| v.class_of(o)) {
            types.entry(t.subject.clone()).or_default().insert(class);
        }
    }
    types
}

/// Each strongly connected set of domains linked by hasSubDomain that
/// contains a cycle, members in first-appearance order.
pub(crate) fn subdomain_cycles(g: &Graph, v: &Vocabulary) -> Vec<Vec<Subject>> {
    let predicate = v.property_iri(Property::HasSubDomain);
    let mut dg: DiGraph<Subject, ()> = DiGraph::new();
    let mut nodes: HashMap<Subject, NodeIndex> = HashMap::new();
    let mut node =
        |dg: &mut DiGraph<Subject, ()>, s: Subject| *nodes.entry(s.clone()).or_insert_with(|| dg.add_node(s));
    for t in g.iter().filter(|t| t.predicate == predicate) {
        let Some(object) = t.object.to_subject() else {
            continue;
        };
        let a = node(&mut dg, t.subject.clone());
        let b = node(&mut dg, object);
        dg.update_edge(a, b, ());
    }
    let mut cycles: Vec<Vec<Subject>> = tarjan_scc(&dg)
        .into_iter()
        .filter(|scc| scc.len() > 1 || dg.contains_edge(scc[0], scc[0]))
        .map(|mut scc| {
            scc.sort();
            scc.into_iter().map(|i| dg[i].clone()).collect()
        })
        .collect();
    cycles.sort();
    cycles
}

fn missing_inverses<'g>(g: &'g Graph, v: &Vocabulary) -> Vec<(&'g Triple, Property)> {
    let mut out = Vec::new();
    for t in g.iter() {
        let Some(p) = v.property_of(&t.predicate) else {
            continue;
        };
        let (Some(inverse), Some(object)) = (p.inverse(), t.object.to_subject()) else {
            continue;
        };
        let back = Triple::new(object, v.property_iri(inverse), Term::from(t.subject.clone()));
        if !g.contains(&back) {
            out.push((t, inverse));
        }
    }
    out
}
