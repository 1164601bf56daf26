use std::collections::HashMap;

use crate::model::{Graph, Term, Triple};

use super::ast::{PatternGroup, QueryAst, TermPattern, TriplePattern, Variable};

/// One solution: a slot per variable, `None` when unbound.
pub type Row = Vec<Option<Term>>;

/// Projected solutions in evaluation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolutionTable {
    pub header: Vec<Variable>,
    pub rows: Vec<Row>,
}

impl SolutionTable {
    pub fn new(header: Vec<Variable>) -> Self {
        SolutionTable { header, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|v| v.name() == name)
    }

    /// The value of `name` in row `row`, if bound.
    pub fn get(&self, row: usize, name: &str) -> Option<&Term> {
        self.rows.get(row)?.get(self.column(name)?)?.as_ref()
    }

    /// Appends `other`'s rows; headers must be equal.
    pub fn append(&mut self, other: SolutionTable) {
        debug_assert_eq!(self.header, other.header);
        self.rows.extend(other.rows);
    }
}

struct Slots(HashMap<Variable, usize>);

impl Slots {
    fn of(&self, v: &Variable) -> usize {
        self.0[v]
    }
}

/// Evaluates `q` over `data`. Patterns extend bindings left to right by
/// scanning the graph in insertion order; UNION concatenates left then right.
pub fn evaluate(q: &QueryAst, data: &Graph) -> SolutionTable {
    let vars = q.where_clause.variables();
    let slots = Slots(vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect());
    let seed = vec![vec![None; vars.len()]];
    let solutions = eval_group(&q.where_clause, data, &slots, seed);

    let header = q.header();
    let columns: Vec<Option<usize>> = header.iter().map(|v| slots.0.get(v).copied()).collect();
    let rows =
        solutions.into_iter().map(|row| columns.iter().map(|c| c.and_then(|i| row[i].clone())).collect()).collect();
    SolutionTable { header, rows }
}

fn eval_group(group: &PatternGroup, data: &Graph, slots: &Slots, input: Vec<Row>) -> Vec<Row> {
    match group {
        PatternGroup::Bgp(patterns) => patterns.iter().fold(input, |rows, p| extend(p, data, slots, rows)),
        PatternGroup::Union(l, r) => {
            let mut out = eval_group(l, data, slots, input.clone());
            out.extend(eval_group(r, data, slots, input));
            out
        }
        PatternGroup::Group(items) => items.iter().fold(input, |rows, g| eval_group(g, data, slots, rows)),
    }
}

fn extend(p: &TriplePattern, data: &Graph, slots: &Slots, rows: Vec<Row>) -> Vec<Row> {
    let mut out = Vec::new();
    for row in rows {
        for t in data.iter() {
            if let Some(next) = match_triple(p, t, slots, &row) {
                out.push(next);
            }
        }
    }
    out
}

fn match_triple(p: &TriplePattern, t: &Triple, slots: &Slots, row: &Row) -> Option<Row> {
    let subject = Term::from(t.subject.clone());
    let predicate = Term::Iri(t.predicate.clone());
    let mut next: Option<Row> = None;
    for (pattern, value) in [(&p.subject, &subject), (&p.predicate, &predicate), (&p.object, &t.object)] {
        let current = next.as_ref().unwrap_or(row);
        match pattern {
            TermPattern::Term(c) => {
                if !c.query_eq(value) {
                    return None;
                }
            }
            TermPattern::Var(v) => {
                let i = slots.of(v);
                match &current[i] {
                    Some(bound) if !bound.query_eq(value) => return None,
                    Some(_) => {}
                    None => next.get_or_insert_with(|| row.clone())[i] = Some(value.clone()),
                }
            }
        }
    }
    Some(next.unwrap_or_else(|| row.clone()))
}
