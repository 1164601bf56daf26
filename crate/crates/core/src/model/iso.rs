//! Graph isomorphism modulo blank-node relabeling.
//!
//! Blank nodes are first coloured by iterated neighbourhood hashing, then a
//! backtracking search tries colour-preserving bijections.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::{BlankNode, Graph, Subject, Term, Triple};

/// True iff some bijection between the blank nodes of `a` and `b` makes the
/// triple sets equal.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ground_a, blank_a) = split(a);
    let (ground_b, blank_b) = split(b);
    if ground_a.len() != ground_b.len() || blank_a.len() != blank_b.len() {
        return false;
    }
    if !ground_a.iter().all(|t| b.contains(t)) {
        return false;
    }
    if blank_a.is_empty() {
        return true;
    }

    let nodes_a = blank_nodes(&blank_a);
    let nodes_b = blank_nodes(&blank_b);
    if nodes_a.len() != nodes_b.len() {
        return false;
    }

    let rounds = nodes_a.len().max(1);
    let colours_a = refine(&nodes_a, &blank_a, rounds);
    let colours_b = refine(&nodes_b, &blank_b, rounds);
    if histogram(&colours_a) != histogram(&colours_b) {
        return false;
    }

    let mut order: Vec<&BlankNode> = nodes_a.iter().collect();
    let hist = histogram(&colours_a);
    order.sort_by_key(|n| (hist[&colours_a[*n]], colours_a[*n]));

    let target: HashSet<&Triple> = blank_b.iter().collect();
    let mut mapping: HashMap<BlankNode, BlankNode> = HashMap::new();
    let mut used: HashSet<BlankNode> = HashSet::new();
    search(0, &order, &nodes_b, &colours_a, &colours_b, &blank_a, &target, &mut mapping, &mut used)
}

fn split(g: &Graph) -> (Vec<&Triple>, Vec<Triple>) {
    let mut ground = Vec::new();
    let mut blank = Vec::new();
    for t in g.iter() {
        if matches!(t.subject, Subject::Blank(_)) || matches!(t.object, Term::Blank(_)) {
            blank.push(t.clone());
        } else {
            ground.push(t);
        }
    }
    (ground, blank)
}

fn blank_nodes(triples: &[Triple]) -> Vec<BlankNode> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in triples {
        if let Subject::Blank(b) = &t.subject {
            if seen.insert(b.clone()) {
                out.push(b.clone());
            }
        }
        if let Term::Blank(b) = &t.object {
            if seen.insert(b.clone()) {
                out.push(b.clone());
            }
        }
    }
    out
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

fn refine(nodes: &[BlankNode], triples: &[Triple], rounds: usize) -> HashMap<BlankNode, u64> {
    let mut colours: HashMap<BlankNode, u64> = nodes.iter().map(|n| (n.clone(), 0)).collect();
    for _ in 0..rounds {
        let mut signatures: HashMap<&BlankNode, Vec<u64>> = HashMap::new();
        for t in triples {
            let subject_key = match &t.subject {
                Subject::Blank(b) => colours[b],
                Subject::Iri(i) => hash_of(i),
            };
            let object_key = match &t.object {
                Term::Blank(b) => colours[b],
                other => hash_of(other),
            };
            if let Subject::Blank(b) = &t.subject {
                signatures.entry(b).or_default().push(hash_of(&(0u8, &t.predicate, object_key)));
            }
            if let Term::Blank(b) = &t.object {
                signatures.entry(b).or_default().push(hash_of(&(1u8, &t.predicate, subject_key)));
            }
        }
        colours = nodes
            .iter()
            .map(|n| {
                let mut sig = signatures.remove(n).unwrap_or_default();
                sig.sort_unstable();
                (n.clone(), hash_of(&(colours[n], sig)))
            })
            .collect();
    }
    colours
}

fn histogram(colours: &HashMap<BlankNode, u64>) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for c in colours.values() {
        *h.entry(*c).or_insert(0) += 1;
    }
    h
}

fn map_triple(t: &Triple, mapping: &HashMap<BlankNode, BlankNode>) -> Option<Triple> {
    let subject = match &t.subject {
        Subject::Blank(b) => Subject::Blank(mapping.get(b)?.clone()),
        s => s.clone(),
    };
    let object = match &t.object {
        Term::Blank(b) => Term::Blank(mapping.get(b)?.clone()),
        o => o.clone(),
    };
    Some(Triple { subject, predicate: t.predicate.clone(), object })
}

#[allow(clippy::too_many_arguments)]
fn search(
    depth: usize,
    order: &[&BlankNode],
    candidates: &[BlankNode],
    colours_a: &HashMap<BlankNode, u64>,
    colours_b: &HashMap<BlankNode, u64>,
    source: &[Triple],
    target: &HashSet<&Triple>,
    mapping: &mut HashMap<BlankNode, BlankNode>,
    used: &mut HashSet<BlankNode>,
) -> bool {
    let Some(node) = order.get(depth) else {
        return source.iter().all(|t| map_triple(t, mapping).is_some_and(|m| target.contains(&m)));
    };
    for cand in candidates {
        if used.contains(cand) || colours_b[cand] != colours_a[*node] {
            continue;
        }
        mapping.insert((*node).clone(), cand.clone());
        used.insert(cand.clone());
        // every triple whose blank nodes are all mapped must land in the target
        let consistent = source.iter().filter_map(|t| map_triple(t, mapping)).all(|m| target.contains(&m));
        if consistent && search(depth + 1, order, candidates, colours_a, colours_b, source, target, mapping, used) {
            return true;
        }
        mapping.remove(*node);
        used.remove(cand);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Iri, Literal};
    use proptest::prelude::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://ex/{s}")).unwrap()
    }

    fn bn(s: &str) -> BlankNode {
        BlankNode::new(s).unwrap()
    }

    /// Oracle: try every bijection between the blank labels.
    fn brute_force_isomorphic(a: &Graph, b: &Graph) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let (_, ta) = split(a);
        let (_, tb) = split(b);
        let na = blank_nodes(&ta);
        let nb = blank_nodes(&tb);
        if na.len() != nb.len() {
            return false;
        }
        fn permute(k: usize, items: &mut Vec<BlankNode>, out: &mut Vec<Vec<BlankNode>>) {
            if k == items.len() {
                out.push(items.clone());
                return;
            }
            for i in k..items.len() {
                items.swap(k, i);
                permute(k + 1, items, out);
                items.swap(k, i);
            }
        }
        let mut perms = Vec::new();
        permute(0, &mut nb.clone(), &mut perms);
        perms.into_iter().any(|perm| {
            let mapping: HashMap<BlankNode, BlankNode> = na.iter().cloned().zip(perm).collect();
            a.iter().all(|t| map_triple(t, &mapping).is_some_and(|m| b.contains(&m)))
        })
    }

    #[test]
    fn reflexive_and_extra_triple() {
        let mut g = Graph::new();
        g.insert(Triple::new(iri("a"), iri("p"), bn("x")));
        g.insert(Triple::new(bn("x"), iri("q"), Literal::simple("v")));
        assert!(isomorphic(&g, &g));
        let mut h = g.clone();
        h.insert(Triple::new(iri("a"), iri("p"), iri("b")));
        assert!(!isomorphic(&g, &h));
    }

    #[test]
    fn relabelled_blanks_are_isomorphic() {
        let mut a = Graph::new();
        a.insert(Triple::new(bn("x"), iri("p"), bn("y")));
        a.insert(Triple::new(bn("y"), iri("p"), bn("x")));
        let mut b = Graph::new();
        b.insert(Triple::new(bn("m"), iri("p"), bn("n")));
        b.insert(Triple::new(bn("n"), iri("p"), bn("m")));
        assert!(isomorphic(&a, &b));
        assert!(brute_force_isomorphic(&a, &b));
    }

    #[test]
    fn regular_structures_need_search() {
        // two 2-cycles vs one 4-cycle: every node looks alike locally
        let cycle = |labels: &[(&str, &str)]| -> Graph {
            labels.iter().map(|(s, o)| Triple::new(bn(s), iri("p"), bn(o))).collect()
        };
        let two = cycle(&[("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")]);
        let four = cycle(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        assert!(!isomorphic(&two, &four));
        assert!(!brute_force_isomorphic(&two, &four));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        let node = prop_oneof![
            (0..4u8).prop_map(|i| Term::Blank(bn(&format!("b{i}")))),
            (0..2u8).prop_map(|i| Term::Iri(iri(&format!("n{i}")))),
        ];
        let obj = prop_oneof![node.clone(), (0..2u8).prop_map(|i| Term::Literal(Literal::simple(format!("{i}"))))];
        proptest::collection::vec((node, 0..2u8, obj), 0..10).prop_map(|ts| {
            ts.into_iter()
                .filter_map(|(s, p, o)| Some(Triple::new(s.to_subject()?, iri(&format!("p{p}")), o)))
                .collect()
        })
    }

    fn relabel(g: &Graph, perm: &[usize]) -> Graph {
        let map = |b: &BlankNode| {
            let i: usize = b.label()[1..].parse().unwrap();
            bn(&format!("r{}", perm[i]))
        };
        g.iter()
            .map(|t| {
                let s = match &t.subject {
                    Subject::Blank(b) => Subject::Blank(map(b)),
                    s => s.clone(),
                };
                let o = match &t.object {
                    Term::Blank(b) => Term::Blank(map(b)),
                    o => o.clone(),
                };
                Triple { subject: s, predicate: t.predicate.clone(), object: o }
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn agrees_with_bijection_enumeration(a in arb_graph(), b in arb_graph()) {
            prop_assert_eq!(isomorphic(&a, &b), brute_force_isomorphic(&a, &b));
            prop_assert_eq!(isomorphic(&a, &b), isomorphic(&b, &a));
            prop_assert!(isomorphic(&a, &a));
        }

        #[test]
        fn relabelling_preserves_isomorphism(a in arb_graph(), perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
            let b = relabel(&a, &perm);
            prop_assert!(isomorphic(&a, &b));
            prop_assert!(brute_force_isomorphic(&a, &b));
        }
    }
}
