//! RDF terms, triples, prefix maps and the insertion-ordered [`Graph`].

mod graph;
mod iso;
mod prefix;
mod term;

pub use graph::Graph;
pub use iso::isomorphic;
pub use prefix::PrefixMap;
pub use term::{is_xml_name, parse_date, resolve_id, BlankNode, Iri, Literal, Subject, Term, Triple};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed IRI {text:?}: {reason}")]
    MalformedIri { text: String, reason: &'static str },
    #[error("malformed blank node label {0:?}")]
    MalformedBlankNode(String),
    #[error("malformed language tag {0:?}")]
    MalformedLanguageTag(String),
    #[error("{0:?} is not a YYYY-MM-DD date")]
    InvalidDate(String),
}

/// Well-known namespace and term IRIs.
pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const XML: &str = "http://www.w3.org/XML/1998/namespace";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
    pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
    pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
    pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
    pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
    pub const OWL_INVERSE_OF: &str = "http://www.w3.org/2002/07/owl#inverseOf";
    pub const OWL_ONTOLOGY: &str = "http://www.w3.org/2002/07/owl#Ontology";
    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";

    /// Prefixes registered by default when reading and writing documents.
    pub const STANDARD_PREFIXES: [(&str, &str); 4] = [("rdf", RDF), ("rdfs", RDFS), ("owl", OWL), ("xsd", XSD)];
}

pub(crate) fn rdf_type() -> Iri {
    Iri::new_unchecked(vocab::RDF_TYPE)
}
