//! RDF/XML reading and writing, plus N-Triples.

mod ntriples;
mod parser;
mod writer;

pub use ntriples::{parse_ntriples, parse_term, serialize_ntriples};
pub use parser::parse_rdfxml;
pub use writer::serialize_rdfxml;

use thiserror::Error;

pub const MEDIA_TYPE: &str = "application/rdf+xml";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfXmlError {
    #[error("line {line}: XML syntax error: {reason}")]
    XmlSyntax { line: usize, reason: String },
    #[error("line {line}: unsupported RDF/XML construct: {construct}")]
    UnsupportedConstruct { line: usize, construct: String },
}

impl RdfXmlError {
    pub fn line(&self) -> usize {
        match self {
            RdfXmlError::XmlSyntax { line, .. } | RdfXmlError::UnsupportedConstruct { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

/// Non-fatal findings from one parse, in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub warnings: Vec<Diagnostic>,
}
