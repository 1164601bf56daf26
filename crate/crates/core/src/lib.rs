//! Personal-web ontology toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the RDF terms, triples and the insertion-ordered [`Graph`].
//! * [`rdfxml`] reads and writes the RDF/XML subset used by per-site ontology
//!   files, plus N-Triples.
//! * [`ontology`] knows the Web/Person/Domain/Documents vocabulary, converts
//!   between graphs and a typed [`PersonalWebModel`], and validates graphs
//!   against the declared domains and ranges.
//! * [`sparql`] parses and evaluates a small SPARQL subset (PREFIX, SELECT,
//!   basic graph patterns, UNION) and renders result tables.
//! * [`federation`] fetches several hosted ontology files and merges them into
//!   one queryable [`Dataset`].

pub mod federation;
pub mod model;
pub mod ontology;
pub mod rdfxml;
pub mod sparql;

pub use federation::{Dataset, FetchError, LoadError, LoadOptions, SourceSpec};
pub use model::{BlankNode, Graph, Iri, Literal, ModelError, PrefixMap, Subject, Term, Triple};
pub use ontology::{PersonalWebModel, ValidationReport, Vocabulary};
pub use rdfxml::{ParseDiagnostics, RdfXmlError};
pub use sparql::{QueryAst, QueryError, ResultFormat, SolutionTable};
