//! Event-driven reader for the striped RDF/XML subset.
//!
//! Supported: the `rdf:RDF` envelope, typed node elements, `rdf:about`,
//! `rdf:ID`, `rdf:resource`, `rdf:datatype`, `xml:lang`, `xml:base`, property
//! attributes, nested node elements and DOCTYPE entity declarations. Anything
//! else from the RDF/XML grammar is rejected with a located error.

use std::collections::HashMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{Diagnostic, ParseDiagnostics, RdfXmlError};
use crate::model::{rdf_type, resolve_id, vocab, BlankNode, Graph, Iri, Literal, Subject, Term, Triple};

/// Parses an RDF/XML document, resolving relative references against `base`.
pub fn parse_rdfxml(document: &[u8], base: &Iri) -> Result<(Graph, ParseDiagnostics), RdfXmlError> {
    let text = std::str::from_utf8(document).map_err(|e| {
        let line = 1 + document[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count();
        RdfXmlError::XmlSyntax { line, reason: "document is not valid UTF-8".into() }
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    Parser::new(text, base.clone()).run()
}

#[derive(Debug, Clone)]
struct Context {
    base: Iri,
    lang: Option<String>,
    pushed_namespaces: usize,
}

#[derive(Debug)]
enum Frame {
    Rdf(Context),
    Node {
        ctx: Context,
    },
    Property {
        ctx: Context,
        line: usize,
        subject: Subject,
        predicate: Iri,
        resource: Option<Iri>,
        datatype: Option<Iri>,
        attributes: Vec<(Iri, String)>,
        text: String,
        object: Option<Term>,
    },
}

impl Frame {
    fn ctx(&self) -> &Context {
        match self {
            Frame::Rdf(ctx) | Frame::Node { ctx, .. } | Frame::Property { ctx, .. } => ctx,
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    line_starts: Vec<usize>,
    document_base: Iri,
    entities: HashMap<String, String>,
    namespaces: Vec<(String, String)>,
    stack: Vec<Frame>,
    graph: Graph,
    diagnostics: ParseDiagnostics,
    blank_counter: usize,
    /// subject of each open node element, parallel to `Frame::Node` entries
    node_subjects: Vec<Subject>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, base: Iri) -> Self {
        let line_starts = std::iter::once(0).chain(src.match_indices('\n').map(|(i, _)| i + 1)).collect();
        let mut entities = HashMap::new();
        for (name, ns) in vocab::STANDARD_PREFIXES {
            entities.insert(name.to_string(), ns.to_string());
        }
        let mut graph = Graph::new();
        for (p, ns) in vocab::STANDARD_PREFIXES {
            graph.prefixes.insert(p, Iri::new_unchecked(ns));
        }
        Parser {
            src,
            line_starts,
            document_base: base,
            entities,
            namespaces: vec![("xml".into(), vocab::XML.into())],
            stack: Vec::new(),
            graph,
            diagnostics: ParseDiagnostics::default(),
            blank_counter: 0,
            node_subjects: Vec::new(),
        }
    }

    fn line_at(&self, offset: u64) -> usize {
        let offset = offset as usize;
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    fn warn(&mut self, line: usize, message: impl Into<String>) {
        self.diagnostics.warnings.push(Diagnostic { line, message: message.into() });
    }

    fn run(mut self) -> Result<(Graph, ParseDiagnostics), RdfXmlError> {
        let mut reader = Reader::from_str(self.src);
        reader.config_mut().check_end_names = true;
        let mut seen_root = false;
        loop {
            let pos = reader.buffer_position();
            let event = reader.read_event().map_err(|e| RdfXmlError::XmlSyntax {
                line: self.line_at(reader.error_position()),
                reason: e.to_string(),
            })?;
            let line = self.line_at(pos);
            match event {
                Event::Eof => break,
                Event::DocType(d) => self.read_doctype(&d.xml10_content()),
                Event::Start(e) => {
                    self.start_element(&e, line, false, &mut seen_root)?;
                }
                Event::Empty(e) => {
                    self.start_element(&e, line, true, &mut seen_root)?;
                }
                Event::End(_) => self.end_element(line)?,
                Event::Text(t) => self.text(&t.xml10_content(), line),
                Event::CData(c) => self.text(&c.xml10_content(), line),
                Event::GeneralRef(r) => {
                    let resolved = if r.is_char_ref() {
                        r.resolve_char_ref().ok().flatten().map(String::from).ok_or_else(|| RdfXmlError::XmlSyntax {
                            line,
                            reason: "invalid character reference".into(),
                        })?
                    } else {
                        let name = r.xml10_content();
                        self.entity(&name).ok_or_else(|| RdfXmlError::XmlSyntax {
                            line,
                            reason: format!("undefined entity &{name};"),
                        })?
                    };
                    self.text(&resolved, line);
                }
                Event::Comment(_) | Event::Decl(_) | Event::PI(_) => {}
            }
        }
        if !self.stack.is_empty() {
            return Err(RdfXmlError::XmlSyntax {
                line: self.line_starts.len(),
                reason: "unexpected end of document".into(),
            });
        }
        Ok((self.graph, self.diagnostics))
    }

    fn read_doctype(&mut self, content: &str) {
        let mut rest = content;
        while let Some(i) = rest.find("<!ENTITY") {
            rest = rest[i + "<!ENTITY".len()..].trim_start();
            if rest.starts_with('%') {
                continue;
            }
            let name_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let name = &rest[..name_end];
            let after = rest[name_end..].trim_start();
            let Some(quote) = after.chars().next().filter(|c| *c == '"' || *c == '\'') else {
                continue;
            };
            let Some(close) = after[1..].find(quote) else {
                continue;
            };
            let raw = &after[1..1 + close];
            let value = self.expand_entity_text(raw, 0);
            self.entities.insert(name.to_string(), value);
            rest = &after[1 + close..];
        }
    }

    fn expand_entity_text(&self, raw: &str, depth: usize) -> String {
        if depth > 8 || !raw.contains('&') {
            return raw.to_string();
        }
        let mut out = String::new();
        let mut rest = raw;
        while let Some(i) = rest.find('&') {
            out.push_str(&rest[..i]);
            let tail = &rest[i + 1..];
            match tail.find(';') {
                Some(j) => {
                    match self.entity(&tail[..j]) {
                        Some(v) => out.push_str(&self.expand_entity_text(&v, depth + 1)),
                        None => out.push_str(&rest[i..i + j + 2]),
                    }
                    rest = &tail[j + 1..];
                }
                None => {
                    out.push('&');
                    rest = tail;
                }
            }
        }
        out.push_str(rest);
        out
    }

    fn entity(&self, name: &str) -> Option<String> {
        if let Some(num) = name.strip_prefix('#') {
            let code = match num.strip_prefix('x') {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => num.parse().ok()?,
            };
            return char::from_u32(code).map(String::from);
        }
        let predefined = match name {
            "lt" => "<",
            "gt" => ">",
            "amp" => "&",
            "apos" => "'",
            "quot" => "\"",
            _ => return self.entities.get(name).cloned(),
        };
        Some(predefined.to_string())
    }

    /// Expands references in an attribute value. Besides `&name;` this accepts
    /// the `&name:local` form found in hand-copied ontology listings, which
    /// expands to the entity value followed by `local`.
    fn expand_attribute(&self, raw: &str, line: usize) -> Result<String, RdfXmlError> {
        let mut out = String::with_capacity(raw.len());
        let mut chars = raw.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            match c {
                '&' => {
                    let start = i + 1;
                    let mut end = start;
                    while let Some((j, c)) = chars.peek().copied() {
                        if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '#') {
                            end = j + c.len_utf8();
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    let name = &raw[start..end];
                    match chars.peek().map(|(_, c)| *c) {
                        Some(';') => {
                            chars.next();
                            let value = self.entity(name).ok_or_else(|| RdfXmlError::XmlSyntax {
                                line,
                                reason: format!("undefined entity &{name};"),
                            })?;
                            out.push_str(&value);
                        }
                        Some(':') if self.entities.contains_key(name) => {
                            chars.next();
                            out.push_str(&self.entities[name]);
                        }
                        _ => {
                            return Err(RdfXmlError::XmlSyntax {
                                line,
                                reason: format!("malformed entity reference in attribute value {raw:?}"),
                            })
                        }
                    }
                }
                '\t' | '\n' | '\r' => out.push(' '),
                c => out.push(c),
            }
        }
        Ok(out)
    }

    fn namespace(&self, prefix: &str) -> Option<&str> {
        self.namespaces.iter().rev().find(|(p, _)| p == prefix).map(|(_, ns)| ns.as_str())
    }

    fn resolve_qname(&self, qname: &str, line: usize, is_attribute: bool) -> Result<Option<Iri>, RdfXmlError> {
        let (prefix, local) = match qname.split_once(':') {
            Some((p, l)) => (p, l),
            None if is_attribute => return Ok(None),
            None => ("", qname),
        };
        let ns = self.namespace(prefix).ok_or_else(|| RdfXmlError::XmlSyntax {
            line,
            reason: if prefix.is_empty() {
                format!("element <{qname}> has no namespace")
            } else {
                format!("undeclared namespace prefix {prefix:?}")
            },
        })?;
        Iri::new(format!("{ns}{local}")).map(Some).map_err(|e| RdfXmlError::XmlSyntax { line, reason: e.to_string() })
    }

    fn resolve_reference(&self, base: &Iri, reference: &str, line: usize) -> Result<Iri, RdfXmlError> {
        resolve_reference(base, reference).map_err(|reason| RdfXmlError::XmlSyntax { line, reason })
    }

    fn fresh_blank(&mut self) -> BlankNode {
        self.blank_counter += 1;
        BlankNode::new(format!("genid{}", self.blank_counter)).expect("generated label is valid")
    }

    fn start_element(
        &mut self,
        element: &BytesStart<'_>,
        line: usize,
        empty: bool,
        seen_root: &mut bool,
    ) -> Result<(), RdfXmlError> {
        let parent_ctx = match self.stack.last() {
            Some(f) => f.ctx().clone(),
            None => Context { base: self.document_base.clone(), lang: None, pushed_namespaces: 0 },
        };

        // namespace declarations first, they scope the element's own name
        let mut raw_attributes = Vec::new();
        let mut pushed = 0;
        for attr in element.attributes() {
            let attr = attr.map_err(|e| RdfXmlError::XmlSyntax { line, reason: e.to_string() })?;
            let key = std::str::from_utf8(attr.key.as_ref().as_bytes())
                .map_err(|_| RdfXmlError::XmlSyntax { line, reason: "attribute name is not UTF-8".into() })?
                .to_string();
            let value = self.expand_attribute(&attr.value, line)?;
            if key == "xmlns" {
                self.namespaces.push((String::new(), value));
                pushed += 1;
            } else if let Some(prefix) = key.strip_prefix("xmlns:") {
                self.namespaces.push((prefix.to_string(), value));
                pushed += 1;
            } else {
                raw_attributes.push((key, value));
            }
        }
        for (prefix, ns) in &self.namespaces[self.namespaces.len() - pushed..] {
            if !prefix.is_empty() {
                if let Ok(iri) = Iri::new(ns.clone()) {
                    self.graph.prefixes.insert(prefix.clone(), iri);
                }
            }
        }

        let mut ctx = Context { pushed_namespaces: pushed, ..parent_ctx };
        let mut attributes = Vec::new();
        for (key, value) in raw_attributes {
            match key.as_str() {
                "xml:base" => ctx.base = self.resolve_reference(&ctx.base, &value, line)?,
                "xml:lang" => ctx.lang = (!value.is_empty()).then_some(value),
                k if k.starts_with("xml") => {}
                _ => match self.resolve_qname(&key, line, true)? {
                    Some(iri) => attributes.push((iri, value)),
                    None => self.warn(line, format!("unqualified attribute {key:?} ignored")),
                },
            }
        }

        let qname = std::str::from_utf8(element.name().as_ref().as_bytes())
            .map_err(|_| RdfXmlError::XmlSyntax { line, reason: "element name is not UTF-8".into() })?
            .to_string();
        let name = self.resolve_qname(&qname, line, false)?.expect("element names always resolve");

        let frame = match self.stack.last() {
            None => {
                if *seen_root {
                    return Err(RdfXmlError::XmlSyntax { line, reason: "more than one root element".into() });
                }
                *seen_root = true;
                if name.as_str() == format!("{}RDF", vocab::RDF) {
                    Some(Frame::Rdf(ctx))
                } else {
                    self.node_element(name, attributes, ctx, line, empty)?
                }
            }
            Some(Frame::Rdf(_)) => self.node_element(name, attributes, ctx, line, empty)?,
            Some(Frame::Property { .. }) => self.node_element(name, attributes, ctx, line, empty)?,
            Some(Frame::Node { .. }) => self.property_element(name, attributes, ctx, line, empty)?,
        };
        match frame {
            Some(f) if !empty => self.stack.push(f),
            _ => self.pop_namespaces(pushed),
        }
        Ok(())
    }

    fn pop_namespaces(&mut self, count: usize) {
        let keep = self.namespaces.len() - count;
        self.namespaces.truncate(keep);
    }

    fn node_element(
        &mut self,
        name: Iri,
        attributes: Vec<(Iri, String)>,
        ctx: Context,
        line: usize,
        empty: bool,
    ) -> Result<Option<Frame>, RdfXmlError> {
        let rdf_local = name.as_str().strip_prefix(vocab::RDF);
        if let Some(local @ ("Bag" | "Seq" | "Alt")) = rdf_local {
            return Err(RdfXmlError::UnsupportedConstruct { line, construct: format!("container rdf:{local}") });
        }

        let mut about = None;
        let mut id = None;
        let mut types = Vec::new();
        let mut properties = Vec::new();
        for (attr, value) in attributes {
            match attr.as_str().strip_prefix(vocab::RDF) {
                Some("about") => about = Some(value),
                Some("ID") => id = Some(value),
                Some("type") => types.push(self.resolve_reference(&ctx.base, &value, line)?),
                Some(local @ ("nodeID" | "bagID" | "aboutEach" | "aboutEachPrefix")) => {
                    return Err(RdfXmlError::UnsupportedConstruct { line, construct: format!("rdf:{local}") })
                }
                Some(local @ ("resource" | "parseType" | "datatype" | "li")) => {
                    return Err(RdfXmlError::XmlSyntax {
                        line,
                        reason: format!("rdf:{local} is not allowed on a node element"),
                    })
                }
                _ => properties.push((attr, value)),
            }
        }

        let subject = match (about, id) {
            (Some(_), Some(_)) => {
                return Err(RdfXmlError::XmlSyntax { line, reason: "both rdf:about and rdf:ID on one element".into() })
            }
            (Some(about), None) => Subject::Iri(self.resolve_reference(&ctx.base, &about, line)?),
            (None, Some(id)) => Subject::Iri(
                resolve_id(&ctx.base, &id).map_err(|e| RdfXmlError::XmlSyntax { line, reason: e.to_string() })?,
            ),
            (None, None) => Subject::Blank(self.fresh_blank()),
        };

        if let Some(Frame::Property { object, resource, text, line: pline, subject: ps, predicate, .. }) =
            self.stack.last_mut()
        {
            if object.is_some() || resource.is_some() || !text.trim().is_empty() {
                return Err(RdfXmlError::XmlSyntax {
                    line,
                    reason: format!("property element opened on line {pline} has more than one value"),
                });
            }
            *object = Some(Term::from(subject.clone()));
            let link = Triple::new(ps.clone(), predicate.clone(), subject.clone());
            self.graph.insert(link);
        }

        if rdf_local != Some("Description") {
            self.graph.insert(Triple::new(subject.clone(), rdf_type(), name));
        }
        for ty in types {
            self.graph.insert(Triple::new(subject.clone(), rdf_type(), ty));
        }
        for (predicate, value) in properties {
            let literal = plain_or_lang(value, ctx.lang.as_deref(), line)?;
            self.graph.insert(Triple::new(subject.clone(), predicate, literal));
        }

        if empty {
            Ok(None)
        } else {
            self.node_subjects.push(subject);
            Ok(Some(Frame::Node { ctx }))
        }
    }

    fn property_element(
        &mut self,
        predicate: Iri,
        attributes: Vec<(Iri, String)>,
        ctx: Context,
        line: usize,
        empty: bool,
    ) -> Result<Option<Frame>, RdfXmlError> {
        if let Some(local) = predicate.as_str().strip_prefix(vocab::RDF) {
            let is_member = local == "li" || local.strip_prefix('_').is_some_and(|n| n.parse::<u32>().is_ok());
            if is_member {
                return Err(RdfXmlError::UnsupportedConstruct {
                    line,
                    construct: format!("container membership property rdf:{local}"),
                });
            }
        }
        let subject = self.node_subjects.last().cloned().expect("property elements sit inside node elements");

        let mut resource = None;
        let mut datatype = None;
        let mut properties = Vec::new();
        for (attr, value) in attributes {
            match attr.as_str().strip_prefix(vocab::RDF) {
                Some("resource") => resource = Some(self.resolve_reference(&ctx.base, &value, line)?),
                Some("datatype") => datatype = Some(self.resolve_reference(&ctx.base, &value, line)?),
                Some("parseType") => {
                    let construct = if value == "Collection" {
                        "collection (rdf:parseType=\"Collection\")".to_string()
                    } else {
                        format!("rdf:parseType=\"{value}\"")
                    };
                    return Err(RdfXmlError::UnsupportedConstruct { line, construct });
                }
                Some("ID") => {
                    return Err(RdfXmlError::UnsupportedConstruct {
                        line,
                        construct: "reification (rdf:ID on a property element)".into(),
                    })
                }
                Some("nodeID") => {
                    return Err(RdfXmlError::UnsupportedConstruct { line, construct: "rdf:nodeID".into() })
                }
                _ => properties.push((attr, value)),
            }
        }

        if empty {
            let object = self.empty_property_object(resource, datatype, properties, &ctx, line)?;
            self.graph.insert(Triple::new(subject, predicate, object));
            return Ok(None);
        }
        Ok(Some(Frame::Property {
            ctx,
            line,
            subject,
            predicate,
            resource,
            datatype,
            attributes: properties,
            text: String::new(),
            object: None,
        }))
    }

    /// Object of a property element without content.
    fn empty_property_object(
        &mut self,
        resource: Option<Iri>,
        datatype: Option<Iri>,
        properties: Vec<(Iri, String)>,
        ctx: &Context,
        line: usize,
    ) -> Result<Term, RdfXmlError> {
        if resource.is_none() && properties.is_empty() {
            return make_literal(String::new(), datatype, ctx.lang.as_deref(), line, &mut self.diagnostics);
        }
        let node = match resource {
            Some(iri) => Subject::Iri(iri),
            None => Subject::Blank(self.fresh_blank()),
        };
        for (p, value) in properties {
            let literal = plain_or_lang(value, ctx.lang.as_deref(), line)?;
            self.graph.insert(Triple::new(node.clone(), p, literal));
        }
        Ok(node.into())
    }

    fn end_element(&mut self, line: usize) -> Result<(), RdfXmlError> {
        let frame =
            self.stack.pop().ok_or_else(|| RdfXmlError::XmlSyntax { line, reason: "unbalanced end tag".into() })?;
        self.pop_namespaces(frame.ctx().pushed_namespaces);
        match frame {
            Frame::Rdf(_) => {}
            Frame::Node { .. } => {
                self.node_subjects.pop();
            }
            Frame::Property { ctx, line: start, subject, predicate, resource, datatype, attributes, text, object } => {
                if object.is_some() {
                    if !text.trim().is_empty() {
                        return Err(RdfXmlError::XmlSyntax {
                            line: start,
                            reason: "property element mixes text and a node element".into(),
                        });
                    }
                    return Ok(());
                }
                let object = if resource.is_some() || !attributes.is_empty() {
                    if !text.trim().is_empty() {
                        return Err(RdfXmlError::XmlSyntax {
                            line: start,
                            reason: "property element with rdf:resource or property attributes has text content".into(),
                        });
                    }
                    self.empty_property_object(resource, datatype, attributes, &ctx, start)?
                } else {
                    make_literal(text, datatype, ctx.lang.as_deref(), start, &mut self.diagnostics)?
                };
                self.graph.insert(Triple::new(subject, predicate, object));
            }
        }
        Ok(())
    }

    fn text(&mut self, content: &str, line: usize) {
        match self.stack.last_mut() {
            Some(Frame::Property { text, .. }) => text.push_str(content),
            _ if content.trim().is_empty() => {}
            _ => self.warn(line, "text outside a property element ignored"),
        }
    }
}

fn plain_or_lang(value: String, lang: Option<&str>, line: usize) -> Result<Literal, RdfXmlError> {
    match lang {
        Some(lang) => {
            Literal::lang_tagged(value, lang).map_err(|e| RdfXmlError::XmlSyntax { line, reason: e.to_string() })
        }
        None => Ok(Literal::simple(value)),
    }
}

fn make_literal(
    text: String,
    datatype: Option<Iri>,
    lang: Option<&str>,
    line: usize,
    diagnostics: &mut ParseDiagnostics,
) -> Result<Term, RdfXmlError> {
    match datatype {
        Some(dt) => match Literal::typed(text.clone(), dt.clone()) {
            Ok(l) => Ok(l.into()),
            Err(e) => {
                diagnostics.warnings.push(Diagnostic {
                    line,
                    message: format!("{e}; kept as an untyped literal instead of {}", dt.as_str()),
                });
                Ok(Literal::simple(text).into())
            }
        },
        None => Ok(plain_or_lang(text, lang, line)?.into()),
    }
}

/// Resolves an IRI reference against `base`.
pub(crate) fn resolve_reference(base: &Iri, reference: &str) -> Result<Iri, String> {
    if let Ok(iri) = Iri::new(reference) {
        return Ok(iri);
    }
    let joined = if reference.is_empty() {
        base.without_fragment().to_string()
    } else if reference.starts_with('#') {
        format!("{}{}", base.without_fragment(), reference)
    } else {
        url::Url::parse(base.as_str())
            .and_then(|b| b.join(reference))
            .map_err(|e| format!("cannot resolve {reference:?} against {}: {e}", base.as_str()))?
            .to_string()
    };
    Iri::new(joined).map_err(|e| e.to_string())
}
