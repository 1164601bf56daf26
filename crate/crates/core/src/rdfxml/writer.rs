use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::model::{is_xml_name, vocab, BlankNode, Graph, Iri, Literal, Subject, Term, Triple};

/// Serializes `g` as RDF/XML.
///
/// Subjects appear in first-appearance order and their properties in
/// insertion order. Every IRI is written in absolute form via `rdf:about` or
/// `rdf:resource`; `base` only ends up in `xml:base`. A blank node used as the
/// object of exactly one triple is nested inside that property element.
///
/// Predicates must end in an XML name so they can be split into a namespace
/// and an element name. Triples that cannot be written are listed in an XML
/// comment; shared or cyclic blank nodes fall back to `rdf:nodeID`.
pub fn serialize_rdfxml(g: &Graph, base: &Iri) -> String {
    Writer::new(g).write(base)
}

struct Writer<'g> {
    graph: &'g Graph,
    by_subject: Vec<(&'g Subject, Vec<&'g Triple>)>,
    subject_index: HashMap<&'g Subject, usize>,
    inline_blanks: HashSet<&'g BlankNode>,
    namespaces: Vec<(String, String)>,
}

impl<'g> Writer<'g> {
    fn new(graph: &'g Graph) -> Self {
        let mut by_subject: Vec<(&Subject, Vec<&Triple>)> = Vec::new();
        let mut subject_index = HashMap::new();
        let mut object_uses: HashMap<&BlankNode, usize> = HashMap::new();
        for t in graph.iter() {
            let i = *subject_index.entry(&t.subject).or_insert_with(|| {
                by_subject.push((&t.subject, Vec::new()));
                by_subject.len() - 1
            });
            by_subject[i].1.push(t);
            if let Term::Blank(b) = &t.object {
                *object_uses.entry(b).or_insert(0) += 1;
            }
        }
        let candidates: HashSet<&BlankNode> =
            object_uses.into_iter().filter(|(_, n)| *n == 1).map(|(b, _)| b).collect();

        let mut writer =
            Writer { graph, by_subject, subject_index, inline_blanks: HashSet::new(), namespaces: Vec::new() };
        writer.inline_blanks = writer.acyclic_inline(&candidates);
        writer.collect_namespaces();
        writer
    }

    /// Drops candidates that would be nested inside themselves.
    fn acyclic_inline(&self, candidates: &HashSet<&'g BlankNode>) -> HashSet<&'g BlankNode> {
        let parent: HashMap<&BlankNode, &Subject> = self
            .graph
            .iter()
            .filter_map(|t| match &t.object {
                Term::Blank(b) if candidates.contains(b) => Some((b, &t.subject)),
                _ => None,
            })
            .collect();
        candidates
            .iter()
            .copied()
            .filter(|b| {
                let mut current = *b;
                let mut steps = 0;
                while let Some(Subject::Blank(p)) = parent.get(current) {
                    if p == *b || steps > parent.len() {
                        return false;
                    }
                    if !candidates.contains(p) {
                        break;
                    }
                    current = p;
                    steps += 1;
                }
                true
            })
            .collect()
    }

    fn collect_namespaces(&mut self) {
        let mut namespaces: Vec<(String, String)> =
            vocab::STANDARD_PREFIXES.iter().map(|(p, ns)| (p.to_string(), ns.to_string())).collect();
        for (p, ns) in self.graph.prefixes.iter() {
            let taken = namespaces.iter().any(|(q, n)| q == p || n == ns.as_str());
            if !taken && is_xml_name(p) && !p.to_ascii_lowercase().starts_with("xml") {
                namespaces.push((p.to_string(), ns.as_str().to_string()));
            }
        }
        let mut generated = 0;
        for t in self.graph.iter() {
            if let Some((ns, _)) = split_iri(&t.predicate) {
                if !namespaces.iter().any(|(_, n)| n == ns) {
                    let name = loop {
                        let candidate = format!("ns{generated}");
                        generated += 1;
                        if !namespaces.iter().any(|(p, _)| *p == candidate) {
                            break candidate;
                        }
                    };
                    namespaces.push((name, ns.to_string()));
                }
            }
        }
        self.namespaces = namespaces;
    }

    fn qname(&self, iri: &Iri) -> Option<String> {
        let (ns, local) = split_iri(iri)?;
        // prefer the longest registered namespace for stable, readable names
        self.namespaces
            .iter()
            .filter(|(_, n)| iri.as_str().starts_with(n.as_str()) && is_xml_name(&iri.as_str()[n.len()..]))
            .max_by_key(|(_, n)| n.len())
            .map(|(p, n)| format!("{p}:{}", &iri.as_str()[n.len()..]))
            .or_else(|| self.namespaces.iter().find(|(_, n)| n == ns).map(|(p, _)| format!("{p}:{local}")))
    }

    fn write(&self, base: &Iri) -> String {
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rdf:RDF");
        for (i, (p, ns)) in self.namespaces.iter().enumerate() {
            let sep = if i == 0 { " " } else { "\n    " };
            let _ = write!(out, "{sep}xmlns:{p}=\"{}\"", escape_attr(ns));
        }
        let _ = write!(out, "\n    xml:base=\"{}\"", escape_attr(base.as_str()));

        let mut unwritable = Vec::new();
        let top_level: Vec<_> = self
            .by_subject
            .iter()
            .filter(|(s, _)| !matches!(s, Subject::Blank(b) if self.inline_blanks.contains(b)))
            .collect();
        if top_level.is_empty() {
            out.push_str("/>\n");
            return out;
        }
        out.push_str(">\n");
        for (subject, triples) in top_level {
            self.write_node(&mut out, subject, triples, 1, &mut unwritable);
        }
        if !unwritable.is_empty() {
            out.push_str("  <!-- triples without an RDF/XML form:\n");
            for t in unwritable {
                let _ = writeln!(out, "    {}", t.to_string().replace("--", "- -"));
            }
            out.push_str("  -->\n");
        }
        out.push_str("</rdf:RDF>\n");
        out
    }

    fn write_node(
        &self,
        out: &mut String,
        subject: &Subject,
        triples: &[&'g Triple],
        depth: usize,
        unwritable: &mut Vec<&'g Triple>,
    ) {
        let indent = "  ".repeat(depth);
        let rdf_type = crate::model::rdf_type();
        // the first rdf:type with a writable name becomes the element name
        let type_triple = triples
            .iter()
            .position(|t| t.predicate == rdf_type && t.object.as_iri().is_some_and(|o| self.qname(o).is_some()));
        let element = match type_triple {
            Some(i) => self.qname(triples[i].object.as_iri().unwrap()).unwrap(),
            None => "rdf:Description".to_string(),
        };
        let identity = match subject {
            Subject::Iri(iri) => format!(" rdf:about=\"{}\"", escape_attr(iri.as_str())),
            Subject::Blank(b) if self.inline_blanks.contains(b) || !self.is_object(b) => String::new(),
            Subject::Blank(b) => format!(" rdf:nodeID=\"{}\"", b.label()),
        };
        let properties: Vec<&&Triple> =
            triples.iter().enumerate().filter(|(i, _)| Some(*i) != type_triple).map(|(_, t)| t).collect();
        if properties.is_empty() {
            let _ = writeln!(out, "{indent}<{element}{identity}/>");
            return;
        }
        let _ = writeln!(out, "{indent}<{element}{identity}>");
        for t in properties {
            let Some(name) = self.qname(&t.predicate) else {
                unwritable.push(t);
                continue;
            };
            self.write_property(out, &name, &t.object, depth + 1, unwritable);
        }
        let _ = writeln!(out, "{indent}</{element}>");
    }

    fn is_object(&self, b: &BlankNode) -> bool {
        self.graph.iter().any(|t| matches!(&t.object, Term::Blank(o) if o == b))
    }

    fn write_property(
        &self,
        out: &mut String,
        name: &str,
        object: &Term,
        depth: usize,
        unwritable: &mut Vec<&'g Triple>,
    ) {
        let indent = "  ".repeat(depth);
        match object {
            Term::Iri(iri) => {
                let _ = writeln!(out, "{indent}<{name} rdf:resource=\"{}\"/>", escape_attr(iri.as_str()));
            }
            Term::Blank(b) if self.inline_blanks.contains(b) => {
                let subject = Subject::Blank(b.clone());
                let nested = self.subject_index.get(&subject).map(|i| self.by_subject[*i].1.as_slice()).unwrap_or(&[]);
                let _ = writeln!(out, "{indent}<{name}>");
                self.write_node(out, &subject, nested, depth + 1, unwritable);
                let _ = writeln!(out, "{indent}</{name}>");
            }
            Term::Blank(b) => {
                let _ = writeln!(out, "{indent}<{name} rdf:nodeID=\"{}\"/>", b.label());
            }
            Term::Literal(lit) => {
                let _ =
                    writeln!(out, "{indent}<{name}{}>{}</{name}>", literal_attributes(lit), escape_text(lit.lexical()));
            }
        }
    }
}

fn literal_attributes(lit: &Literal) -> String {
    match (lit.lang(), lit.datatype()) {
        (Some(lang), _) => format!(" xml:lang=\"{}\"", escape_attr(lang)),
        (None, Some(dt)) => format!(" rdf:datatype=\"{}\"", escape_attr(dt.as_str())),
        (None, None) => String::new(),
    }
}

/// Splits an IRI into a namespace and the longest trailing XML name.
fn split_iri(iri: &Iri) -> Option<(&str, &str)> {
    let s = iri.as_str();
    let mut start = None;
    for (i, _) in s.char_indices().rev() {
        if is_xml_name(&s[i..]) {
            start = Some(i);
        } else if !s[i..].chars().next().is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            break;
        }
    }
    let start = start?;
    (start > 0).then(|| (&s[..start], &s[start..]))
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::isomorphic;
    use crate::rdfxml::parse_rdfxml;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn empty_graph_is_minimal_envelope() {
        let out = serialize_rdfxml(&Graph::new(), &iri("http://h/x.owl"));
        assert!(out.trim_end().ends_with("xml:base=\"http://h/x.owl\"/>"));
        let (g, _) = parse_rdfxml(out.as_bytes(), &iri("http://h/x.owl")).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn split_names() {
        assert_eq!(split_iri(&iri("http://h/x.owl#docTitle")), Some(("http://h/x.owl#", "docTitle")));
        assert_eq!(split_iri(&iri("http://h/p1")), Some(("http://h/", "p1")));
        assert_eq!(split_iri(&iri("http://h/123")), None);
        assert_eq!(split_iri(&iri("http://h/")), None);
    }

    #[test]
    fn literals_and_nesting_round_trip() {
        let mut g = Graph::new();
        let s = Subject::Iri(iri("http://h/x.owl#a"));
        let b = BlankNode::new("n1").unwrap();
        g.insert(Triple::new(s.clone(), crate::model::rdf_type(), iri("http://h/x.owl#Web")));
        g.insert(Triple::new(s.clone(), iri("http://h/x.owl#t"), Literal::simple("a < b & \"c\"\r\n  ")));
        g.insert(Triple::new(s.clone(), iri("http://h/x.owl#t"), Literal::lang_tagged("x", "en").unwrap()));
        g.insert(Triple::new(s.clone(), iri("http://h/x.owl#t"), Literal::simple("")));
        g.insert(Triple::new(s, iri("http://h/x.owl#q"), b.clone()));
        g.insert(Triple::new(b, iri("http://h/x.owl#d"), Literal::typed("2010-01-02", iri(vocab::XSD_DATE)).unwrap()));
        let out = serialize_rdfxml(&g, &iri("http://h/x.owl"));
        assert!(out.contains("<ns0:Web rdf:about=\"http://h/x.owl#a\">"), "{out}");
        let (back, _) = parse_rdfxml(out.as_bytes(), &iri("http://elsewhere/")).unwrap();
        assert!(isomorphic(&g, &back), "{out}");
    }

    #[test]
    fn unsplittable_predicates_are_reported() {
        let mut g = Graph::new();
        g.insert(Triple::new(iri("http://h/a"), iri("http://h/123"), iri("http://h/b")));
        let out = serialize_rdfxml(&g, &iri("http://h/"));
        assert!(out.contains("triples without an RDF/XML form"));
        assert!(out.contains("<http://h/123>"));
    }
}
