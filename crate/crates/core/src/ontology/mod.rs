//! The personal-web vocabulary (Web, Person, Domain, Documents and their
//! properties), conversion between graphs and [`PersonalWebModel`], inverse
//! materialization and schema validation.

mod model;
mod validate;

pub use model::{build_graph, extract_model, DocumentRec, DomainRec, PersonRec, PersonalWebModel, WebSite};
pub use validate::{validate, Finding, Severity, ValidationReport};

use thiserror::Error;

use crate::model::{rdf_type, vocab, Graph, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("{0} carries more than one of the Web/Person/Domain/Documents types")]
    ConflictingType(Iri),
    #[error("reference to {0}, which is not an individual of the expected class")]
    DanglingReference(Iri),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Web,
    Person,
    Domain,
    Documents,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::Web, Class::Person, Class::Domain, Class::Documents];

    pub fn name(self) -> &'static str {
        match self {
            Class::Web => "Web",
            Class::Person => "Person",
            Class::Domain => "Domain",
            Class::Documents => "Documents",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Datatype {
    String,
    Date,
}

impl Datatype {
    pub fn iri(self) -> Iri {
        Iri::new_unchecked(match self {
            Datatype::String => vocab::XSD_STRING,
            Datatype::Date => vocab::XSD_DATE,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Range {
    Class(Class),
    Datatype(Datatype),
}

/// Every property of the vocabulary, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Owner,
    HasPart,
    HasScope,
    WebAbout,
    WebTitle,
    Interest,
    Author,
    PrsMbox,
    Consistof,
    HasSubDomain,
    DomDescription,
    DocUri,
    IsPartOf,
    Creator,
    DocDate,
    DocDescription,
    DocLink,
    DocPublish,
    DocTitle,
    DocType,
}

impl Property {
    pub const ALL: [Property; 20] = [
        Property::Owner,
        Property::HasPart,
        Property::HasScope,
        Property::WebAbout,
        Property::WebTitle,
        Property::Interest,
        Property::Author,
        Property::PrsMbox,
        Property::Consistof,
        Property::HasSubDomain,
        Property::DomDescription,
        Property::DocUri,
        Property::IsPartOf,
        Property::Creator,
        Property::DocDate,
        Property::DocDescription,
        Property::DocLink,
        Property::DocPublish,
        Property::DocTitle,
        Property::DocType,
    ];

    pub fn name(self) -> &'static str {
        use Property::*;
        match self {
            Owner => "owner",
            HasPart => "hasPart",
            HasScope => "hasScope",
            WebAbout => "webAbout",
            WebTitle => "webTitle",
            Interest => "interest",
            Author => "Author",
            PrsMbox => "prsMbox",
            Consistof => "consistof",
            HasSubDomain => "hasSubDomain",
            DomDescription => "domDescription",
            DocUri => "docURI",
            IsPartOf => "isPartOf",
            Creator => "Creator",
            DocDate => "docDate",
            DocDescription => "docDescription",
            DocLink => "docLink",
            DocPublish => "docPublish",
            DocTitle => "docTitle",
            DocType => "docType",
        }
    }

    pub fn domain(self) -> Class {
        use Property::*;
        match self {
            Owner | HasPart | HasScope | WebAbout | WebTitle => Class::Web,
            Interest | PrsMbox => Class::Person,
            Consistof | HasSubDomain | DomDescription => Class::Domain,
            Author | DocUri | IsPartOf | Creator | DocDate | DocDescription | DocLink | DocPublish | DocTitle
            | DocType => Class::Documents,
        }
    }

    pub fn range(self) -> Range {
        use Property::*;
        match self {
            Owner | Author | Creator => Range::Class(Class::Person),
            HasPart | Consistof => Range::Class(Class::Documents),
            HasScope | Interest | HasSubDomain => Range::Class(Class::Domain),
            IsPartOf => Range::Class(Class::Web),
            DocDate => Range::Datatype(Datatype::Date),
            WebAbout | WebTitle | PrsMbox | DomDescription | DocUri | DocDescription | DocLink | DocPublish
            | DocTitle | DocType => Range::Datatype(Datatype::String),
        }
    }

    pub fn is_object_property(self) -> bool {
        matches!(self.range(), Range::Class(_))
    }

    pub fn inverse(self) -> Option<Property> {
        match self {
            Property::HasPart => Some(Property::IsPartOf),
            Property::IsPartOf => Some(Property::HasPart),
            _ => None,
        }
    }
}

/// The vocabulary rooted at one ontology file's namespace (`base#`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    namespace: String,
}

/// Vocabulary whose terms live under `base#`.
pub fn vocabulary_for(base: &Iri) -> Vocabulary {
    Vocabulary { namespace: format!("{}#", base.without_fragment()) }
}

impl Vocabulary {
    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn namespace_iri(&self) -> Iri {
        Iri::new_unchecked(self.namespace.clone())
    }

    /// The base IRI the vocabulary was built from (namespace without `#`).
    pub fn base(&self) -> Iri {
        Iri::new_unchecked(self.namespace.trim_end_matches('#'))
    }

    pub fn iri(&self, local: &str) -> Iri {
        Iri::new_unchecked(format!("{}{}", self.namespace, local))
    }

    pub fn class_iri(&self, class: Class) -> Iri {
        self.iri(class.name())
    }

    pub fn property_iri(&self, property: Property) -> Iri {
        self.iri(property.name())
    }

    pub fn class_of(&self, iri: &Iri) -> Option<Class> {
        let local = iri.as_str().strip_prefix(&self.namespace)?;
        Class::ALL.into_iter().find(|c| c.name() == local)
    }

    pub fn property_of(&self, iri: &Iri) -> Option<Property> {
        let local = iri.as_str().strip_prefix(&self.namespace)?;
        Property::ALL.into_iter().find(|p| p.name() == local)
    }

    /// Finds the vocabulary namespace used by a graph: first from class and
    /// property declarations, then from predicates in use.
    pub fn detect(g: &Graph) -> Option<Vocabulary> {
        let declared = [vocab::OWL_CLASS, vocab::OWL_OBJECT_PROPERTY, vocab::OWL_DATATYPE_PROPERTY];
        let from_declarations = g.iter().find_map(|t| {
            let is_declaration = t.predicate.as_str() == vocab::RDF_TYPE
                && t.object.as_iri().is_some_and(|o| declared.contains(&o.as_str()));
            if is_declaration {
                t.subject.as_iri().and_then(namespace_of_vocabulary_term)
            } else {
                None
            }
        });
        from_declarations
            .or_else(|| g.iter().find_map(|t| namespace_of_vocabulary_term(&t.predicate)))
            .map(|namespace| Vocabulary { namespace })
    }
}

fn namespace_of_vocabulary_term(iri: &Iri) -> Option<String> {
    let (ns, local) = iri.as_str().rsplit_once('#')?;
    let known = Class::ALL.iter().any(|c| c.name() == local) || Property::ALL.iter().any(|p| p.name() == local);
    known.then(|| format!("{ns}#"))
}

/// The complete schema under `base`: class declarations, property
/// declarations with their domain and range, the hasPart/isPartOf inverse
/// pair and the comment attached to webTitle, in declaration order.
pub fn emit_schema(base: &Iri) -> Graph {
    let v = vocabulary_for(base);
    let mut g = Graph::new();
    g.prefixes.insert("", v.namespace_iri());
    for (p, ns) in vocab::STANDARD_PREFIXES {
        g.prefixes.insert(p, Iri::new_unchecked(ns));
    }
    let ty = rdf_type();
    let domain = Iri::new_unchecked(vocab::RDFS_DOMAIN);
    let range = Iri::new_unchecked(vocab::RDFS_RANGE);
    let inverse_of = Iri::new_unchecked(vocab::OWL_INVERSE_OF);

    for class in Class::ALL {
        g.insert(Triple::new(v.class_iri(class), ty.clone(), Iri::new_unchecked(vocab::OWL_CLASS)));
        for property in Property::ALL.into_iter().filter(|p| listed_with(*p) == class) {
            let p = v.property_iri(property);
            let kind =
                if property.is_object_property() { vocab::OWL_OBJECT_PROPERTY } else { vocab::OWL_DATATYPE_PROPERTY };
            g.insert(Triple::new(p.clone(), ty.clone(), Iri::new_unchecked(kind)));
            g.insert(Triple::new(p.clone(), domain.clone(), v.class_iri(property.domain())));
            if let Some(inv) = property.inverse() {
                g.insert(Triple::new(p.clone(), inverse_of.clone(), v.property_iri(inv)));
            }
            if property == Property::WebTitle {
                let comment = Literal::lang_tagged("null", "en").expect("valid tag");
                g.insert(Triple::new(p.clone(), Iri::new_unchecked(vocab::RDFS_COMMENT), comment));
            }
            let range_iri = match property.range() {
                Range::Class(c) => v.class_iri(c),
                Range::Datatype(d) => d.iri(),
            };
            g.insert(Triple::new(p, range.clone(), range_iri));
        }
    }
    g
}

/// The class whose declaration block introduces a property. `Author` is
/// declared next to Person although its domain is Documents.
fn listed_with(p: Property) -> Class {
    match p {
        Property::Author => Class::Person,
        other => other.domain(),
    }
}

/// Adds the missing half of every hasPart/isPartOf pair. Predicates are
/// recognised by local name, so the closure works for any namespace.
pub fn materialize_inverses(g: &Graph) -> Graph {
    let mut out = g.clone();
    for t in g.iter() {
        let Some((ns, local)) = t.predicate.as_str().rsplit_once('#') else {
            continue;
        };
        let inverse = match local {
            "hasPart" => "isPartOf",
            "isPartOf" => "hasPart",
            _ => continue,
        };
        let Some(object) = t.object.to_subject() else {
            continue;
        };
        let predicate = Iri::new_unchecked(format!("{ns}#{inverse}"));
        out.insert(Triple::new(object, predicate, Term::from(t.subject.clone())));
    }
    out
}
