use std::collections::HashMap;

use chrono::NaiveDate;
use indexmap::IndexMap;

use super::{emit_schema, vocabulary_for, Class, OntologyError, Property, Vocabulary};
use crate::model::{parse_date, rdf_type, vocab, Graph, Iri, Literal, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebSite {
    pub iri: Iri,
    pub title: Option<String>,
    pub about: Option<String>,
    pub owner: Vec<Iri>,
    pub scopes: Vec<Iri>,
    pub parts: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonRec {
    pub iri: Iri,
    pub mbox: Option<String>,
    pub interests: Vec<Iri>,
    /// Documents naming this person through `Author`; derived, never emitted.
    pub authored: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainRec {
    pub iri: Iri,
    pub description: Option<String>,
    pub subdomains: Vec<Iri>,
    pub documents: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRec {
    pub iri: Iri,
    pub doc_uri: Option<String>,
    pub title: Option<String>,
    pub doc_type: Option<String>,
    pub description: Option<String>,
    pub link: Option<String>,
    pub date: Option<NaiveDate>,
    pub publish: Option<String>,
    pub creators: Vec<Iri>,
    pub authors: Vec<Iri>,
    pub part_of: Vec<Iri>,
}

impl WebSite {
    pub fn new(iri: Iri) -> Self {
        WebSite { iri, title: None, about: None, owner: vec![], scopes: vec![], parts: vec![] }
    }
}

impl PersonRec {
    pub fn new(iri: Iri) -> Self {
        PersonRec { iri, mbox: None, interests: vec![], authored: vec![] }
    }
}

impl DomainRec {
    pub fn new(iri: Iri) -> Self {
        DomainRec { iri, description: None, subdomains: vec![], documents: vec![] }
    }
}

impl DocumentRec {
    pub fn new(iri: Iri) -> Self {
        DocumentRec {
            iri,
            doc_uri: None,
            title: None,
            doc_type: None,
            description: None,
            link: None,
            date: None,
            publish: None,
            creators: vec![],
            authors: vec![],
            part_of: vec![],
        }
    }
}

/// Typed view of one site's individuals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PersonalWebModel {
    pub webs: Vec<WebSite>,
    pub persons: Vec<PersonRec>,
    pub domains: Vec<DomainRec>,
    pub documents: Vec<DocumentRec>,
    /// Triples that did not map onto any field during extraction.
    pub ignored_triples: usize,
}

impl PersonalWebModel {
    pub fn is_empty(&self) -> bool {
        self.webs.is_empty() && self.persons.is_empty() && self.domains.is_empty() && self.documents.is_empty()
    }

    pub fn web(&self, iri: &Iri) -> Option<&WebSite> {
        self.webs.iter().find(|w| w.iri == *iri)
    }

    pub fn person(&self, iri: &Iri) -> Option<&PersonRec> {
        self.persons.iter().find(|w| w.iri == *iri)
    }

    pub fn domain(&self, iri: &Iri) -> Option<&DomainRec> {
        self.domains.iter().find(|w| w.iri == *iri)
    }

    pub fn document(&self, iri: &Iri) -> Option<&DocumentRec> {
        self.documents.iter().find(|w| w.iri == *iri)
    }
}

/// Classes individuals by explicit `rdf:type` first, then by how they are
/// used as subject or object of vocabulary properties.
fn classify(g: &Graph, v: &Vocabulary) -> Result<IndexMap<Iri, Class>, OntologyError> {
    let mut explicit: IndexMap<Iri, Class> = IndexMap::new();
    for t in g.iter() {
        if t.predicate.as_str() != vocab::RDF_TYPE {
            continue;
        }
        let (Some(s), Some(class)) = (t.subject.as_iri(), t.object.as_iri().and_then(|o| v.class_of(o))) else {
            continue;
        };
        match explicit.get(s) {
            Some(existing) if *existing != class => return Err(OntologyError::ConflictingType(s.clone())),
            Some(_) => {}
            None => {
                explicit.insert(s.clone(), class);
            }
        }
    }

    let mut inferred: IndexMap<Iri, Class> = IndexMap::new();
    let mut note = |iri: &Iri, class: Class| -> Result<(), OntologyError> {
        if explicit.contains_key(iri) {
            return Ok(());
        }
        match inferred.get(iri) {
            Some(existing) if *existing != class => Err(OntologyError::ConflictingType(iri.clone())),
            Some(_) => Ok(()),
            None => {
                inferred.insert(iri.clone(), class);
                Ok(())
            }
        }
    };
    for t in g.iter() {
        let Some(p) = v.property_of(&t.predicate) else {
            continue;
        };
        if let Some(s) = t.subject.as_iri() {
            note(s, p.domain())?;
        }
        if let (super::Range::Class(range), Some(o)) = (p.range(), t.object.as_iri()) {
            note(o, range)?;
        }
    }
    explicit.extend(inferred);
    Ok(explicit)
}

/// Builds the typed model for the vocabulary under `base`.
pub fn extract_model(g: &Graph, base: &Iri) -> Result<PersonalWebModel, OntologyError> {
    let v = vocabulary_for(base);
    let classes = classify(g, &v)?;

    let mut m = PersonalWebModel::default();
    let mut index: HashMap<&Iri, usize> = HashMap::new();
    for (iri, class) in &classes {
        let slot = match class {
            Class::Web => {
                m.webs.push(WebSite::new(iri.clone()));
                m.webs.len()
            }
            Class::Person => {
                m.persons.push(PersonRec::new(iri.clone()));
                m.persons.len()
            }
            Class::Domain => {
                m.domains.push(DomainRec::new(iri.clone()));
                m.domains.len()
            }
            Class::Documents => {
                m.documents.push(DocumentRec::new(iri.clone()));
                m.documents.len()
            }
        };
        index.insert(iri, slot - 1);
    }

    let mut ignored = 0;
    for t in g.iter() {
        let used = fill(&mut m, &v, &classes, &index, t);
        if !used {
            ignored += 1;
        }
    }
    m.ignored_triples = ignored;
    Ok(m)
}

fn fill(
    m: &mut PersonalWebModel,
    v: &Vocabulary,
    classes: &IndexMap<Iri, Class>,
    index: &HashMap<&Iri, usize>,
    t: &Triple,
) -> bool {
    let Some(subject) = t.subject.as_iri() else {
        return false;
    };
    if t.predicate.as_str() == vocab::RDF_TYPE {
        let class = t.object.as_iri().and_then(|o| v.class_of(o));
        return class.is_some() && class == classes.get(subject).copied();
    }
    let Some(p) = v.property_of(&t.predicate) else {
        return false;
    };
    if classes.get(subject) != Some(&p.domain()) {
        return false;
    }
    let i = index[subject];

    if let super::Range::Class(range) = p.range() {
        let Some(object) = t.object.as_iri().filter(|o| classes.get(*o) == Some(&range)) else {
            return false;
        };
        let list = match p {
            Property::Owner => &mut m.webs[i].owner,
            Property::HasScope => &mut m.webs[i].scopes,
            Property::HasPart => &mut m.webs[i].parts,
            Property::Interest => &mut m.persons[i].interests,
            Property::HasSubDomain => &mut m.domains[i].subdomains,
            Property::Consistof => &mut m.domains[i].documents,
            Property::Creator => &mut m.documents[i].creators,
            Property::IsPartOf => &mut m.documents[i].part_of,
            Property::Author => {
                m.persons[index[object]].authored.push(subject.clone());
                &mut m.documents[i].authors
            }
            _ => unreachable!("data properties have datatype ranges"),
        };
        list.push(object.clone());
        return true;
    }

    let Some(literal) = t.object.as_literal() else {
        return false;
    };
    if p == Property::DocDate {
        let doc = &mut m.documents[i];
        return match parse_date(literal.lexical()) {
            Some(date) if doc.date.is_none() => {
                doc.date = Some(date);
                true
            }
            _ => false,
        };
    }
    let slot = match p {
        Property::WebTitle => &mut m.webs[i].title,
        Property::WebAbout => &mut m.webs[i].about,
        Property::PrsMbox => &mut m.persons[i].mbox,
        Property::DomDescription => &mut m.domains[i].description,
        Property::DocUri => &mut m.documents[i].doc_uri,
        Property::DocTitle => &mut m.documents[i].title,
        Property::DocType => &mut m.documents[i].doc_type,
        Property::DocDescription => &mut m.documents[i].description,
        Property::DocLink => &mut m.documents[i].link,
        Property::DocPublish => &mut m.documents[i].publish,
        _ => unreachable!("object properties handled above"),
    };
    if slot.is_some() {
        return false;
    }
    *slot = Some(literal.lexical().to_string());
    true
}

/// Writes the model as triples under `base`, optionally preceded by the schema.
pub fn build_graph(m: &PersonalWebModel, base: &Iri, include_schema: bool) -> Result<Graph, OntologyError> {
    let v = vocabulary_for(base);
    let mut classes: HashMap<&Iri, Class> = HashMap::new();
    let all = m
        .webs
        .iter()
        .map(|w| (&w.iri, Class::Web))
        .chain(m.persons.iter().map(|p| (&p.iri, Class::Person)))
        .chain(m.domains.iter().map(|d| (&d.iri, Class::Domain)))
        .chain(m.documents.iter().map(|d| (&d.iri, Class::Documents)));
    for (iri, class) in all {
        if classes.insert(iri, class).is_some_and(|c| c != class) {
            return Err(OntologyError::ConflictingType(iri.clone()));
        }
    }
    let check = |refs: &[Iri], class: Class| -> Result<(), OntologyError> {
        match refs.iter().find(|r| classes.get(r) != Some(&class)) {
            Some(r) => Err(OntologyError::DanglingReference(r.clone())),
            None => Ok(()),
        }
    };
    for w in &m.webs {
        check(&w.owner, Class::Person)?;
        check(&w.scopes, Class::Domain)?;
        check(&w.parts, Class::Documents)?;
    }
    for p in &m.persons {
        check(&p.interests, Class::Domain)?;
        check(&p.authored, Class::Documents)?;
    }
    for d in &m.domains {
        check(&d.subdomains, Class::Domain)?;
        check(&d.documents, Class::Documents)?;
    }
    for d in &m.documents {
        check(&d.creators, Class::Person)?;
        check(&d.authors, Class::Person)?;
        check(&d.part_of, Class::Web)?;
    }

    let mut g = if include_schema { emit_schema(base) } else { Graph::new() };
    g.prefixes.insert("", v.namespace_iri());
    let ty = rdf_type();
    let text = |g: &mut Graph, s: &Iri, p: Property, value: &Option<String>| {
        if let Some(value) = value {
            g.insert(Triple::new(s.clone(), v.property_iri(p), Literal::simple(value.clone())));
        }
    };
    let refs = |g: &mut Graph, s: &Iri, p: Property, targets: &[Iri]| {
        for o in targets {
            g.insert(Triple::new(s.clone(), v.property_iri(p), o.clone()));
        }
    };

    for w in &m.webs {
        g.insert(Triple::new(w.iri.clone(), ty.clone(), v.class_iri(Class::Web)));
        text(&mut g, &w.iri, Property::WebTitle, &w.title);
        text(&mut g, &w.iri, Property::WebAbout, &w.about);
        refs(&mut g, &w.iri, Property::Owner, &w.owner);
        refs(&mut g, &w.iri, Property::HasScope, &w.scopes);
        refs(&mut g, &w.iri, Property::HasPart, &w.parts);
    }
    for p in &m.persons {
        g.insert(Triple::new(p.iri.clone(), ty.clone(), v.class_iri(Class::Person)));
        text(&mut g, &p.iri, Property::PrsMbox, &p.mbox);
        refs(&mut g, &p.iri, Property::Interest, &p.interests);
    }
    for d in &m.domains {
        g.insert(Triple::new(d.iri.clone(), ty.clone(), v.class_iri(Class::Domain)));
        text(&mut g, &d.iri, Property::DomDescription, &d.description);
        refs(&mut g, &d.iri, Property::HasSubDomain, &d.subdomains);
        refs(&mut g, &d.iri, Property::Consistof, &d.documents);
    }
    for d in &m.documents {
        g.insert(Triple::new(d.iri.clone(), ty.clone(), v.class_iri(Class::Documents)));
        text(&mut g, &d.iri, Property::DocUri, &d.doc_uri);
        text(&mut g, &d.iri, Property::DocTitle, &d.title);
        text(&mut g, &d.iri, Property::DocType, &d.doc_type);
        text(&mut g, &d.iri, Property::DocDescription, &d.description);
        text(&mut g, &d.iri, Property::DocLink, &d.link);
        if let Some(date) = d.date {
            g.insert(Triple::new(d.iri.clone(), v.property_iri(Property::DocDate), Literal::date(date)));
        }
        text(&mut g, &d.iri, Property::DocPublish, &d.publish);
        refs(&mut g, &d.iri, Property::Creator, &d.creators);
        refs(&mut g, &d.iri, Property::Author, &d.authors);
        refs(&mut g, &d.iri, Property::IsPartOf, &d.part_of);
    }
    Ok(g)
}
