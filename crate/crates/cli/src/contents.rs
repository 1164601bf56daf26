use std::fmt::Write as _;

use anyhow::Context;
use pwo_core::sparql::{evaluate, parse_query, PatternGroup, QueryAst};
use pwo_core::{Dataset, Iri, SolutionTable, Term};

use crate::source_vocabulary;

const SCOPE: &str = "Scope";

/// The content-list query: one UNION branch per namespace, prefixed
/// `p1`..`pN` in order. With `domain`, `?Scope` becomes `pS:domain` in
/// branch S.
pub fn contents_query(namespaces: &[Iri], domain: Option<&str>) -> anyhow::Result<QueryAst> {
    let mut text = String::new();
    for (i, ns) in namespaces.iter().enumerate() {
        let _ = writeln!(text, "PREFIX p{}: <{}>", i + 1, ns.as_str());
    }
    text.push_str("SELECT ?Web ?Scope ?SubScope ?DocTitle ?location WHERE {\n");
    for i in 1..=namespaces.len() {
        let scope = match domain {
            Some(name) => format!("p{i}:{name}"),
            None => format!("?{SCOPE}"),
        };
        if i > 1 {
            text.push_str("  UNION\n");
        }
        let _ = writeln!(
            text,
            "  {{ ?Web p{i}:hasScope {scope} . {scope} p{i}:hasSubDomain ?SubScope . \
             ?SubScope p{i}:consistof ?doc . ?doc p{i}:docTitle ?DocTitle . ?doc p{i}:docURI ?location }}"
        );
    }
    text.push_str("}\n");
    parse_query(&text).with_context(|| format!("content query did not parse:\n{text}"))
}

/// Runs the content-list query over `dataset`, one branch per loaded source.
pub fn contents_table(dataset: &Dataset, domain: Option<&str>) -> anyhow::Result<SolutionTable> {
    let mut namespaces = Vec::new();
    for (id, graph) in &dataset.per_source {
        let spec = dataset.source(*id).expect("loaded sources have specs");
        namespaces.push(source_vocabulary(graph, spec)?.namespace_iri());
    }
    let query = contents_query(&namespaces, domain)?;
    let Some(name) = domain else {
        return Ok(evaluate(&query, &dataset.merged));
    };

    // A constant scope leaves ?Scope unbound, so each branch is run on its
    // own and the column is filled with that branch's domain individual.
    let branches = query.where_clause.union_branches();
    let mut table = SolutionTable::new(query.header());
    let column = table.column(SCOPE).expect("scope is projected");
    for (branch, ns) in branches.into_iter().zip(&namespaces) {
        let single = QueryAst { where_clause: PatternGroup::clone(branch), ..query.clone() };
        let mut part = evaluate(&single, &dataset.merged);
        let scope = Term::Iri(Iri::new(format!("{}{name}", ns.as_str()))?);
        for row in &mut part.rows {
            row[column] = Some(scope.clone());
        }
        table.append(part);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwo_core::sparql::TermPattern;

    fn namespaces(n: usize) -> Vec<Iri> {
        (0..n).map(|i| Iri::new(format!("http://h{i}.example/site.owl#")).unwrap()).collect()
    }

    #[test]
    fn one_branch_per_source() {
        for n in 1..=6 {
            let q = contents_query(&namespaces(n), None).unwrap();
            let branches = q.where_clause.union_branches();
            assert_eq!(branches.len(), n);
            assert_eq!(q.where_clause.union_depth(), n - 1);
            for (i, b) in branches.iter().enumerate() {
                let PatternGroup::Bgp(patterns) = b else { panic!("branch {i} is not a pattern list") };
                assert_eq!(patterns.len(), 5);
                assert!(q.prefix(&format!("p{}", i + 1)).is_some());
            }
        }
    }

    #[test]
    fn single_source_has_no_union() {
        let q = contents_query(&namespaces(1), None).unwrap();
        assert!(matches!(q.where_clause, PatternGroup::Bgp(_)));
    }

    #[test]
    fn domain_replaces_scope_in_every_branch() {
        let ns = namespaces(3);
        let q = contents_query(&ns, Some("Linux_OS")).unwrap();
        for (b, ns) in q.where_clause.union_branches().into_iter().zip(&ns) {
            let PatternGroup::Bgp(patterns) = b else { panic!() };
            let expected = Term::Iri(Iri::new(format!("{}Linux_OS", ns.as_str())).unwrap());
            assert_eq!(patterns[0].object, TermPattern::Term(expected.clone()));
            assert_eq!(patterns[1].subject, TermPattern::Term(expected));
            assert!(!patterns
                .iter()
                .any(|p| p.positions().iter().any(|t| t.as_var().is_some_and(|v| v.name() == SCOPE))));
        }
        assert_eq!(q.header()[1].name(), SCOPE);
    }
}
