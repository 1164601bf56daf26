//! Inputs shared by the benchmarks: the bundled fixtures and a synthetic
//! site of configurable size.

use std::path::Path;

use pwo_core::ontology::{build_graph, vocabulary_for, DocumentRec, DomainRec, PersonRec, WebSite};
use pwo_core::{Graph, Iri, PersonalWebModel};

pub const FIXTURES: [&str; 3] = ["ist.owl", "fqh.owl", "dedi.owl"];

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// A site with one web, one owner, `domains` domains in a chain and
/// `docs_per_domain` documents under each.
pub fn synthetic_site(base: &Iri, domains: usize, docs_per_domain: usize) -> Graph {
    let v = vocabulary_for(base);
    let mut m = PersonalWebModel::default();
    let person = PersonRec::new(v.iri("owner"));
    let mut web = WebSite::new(v.iri("web"));
    web.title = Some("synthetic".into());
    web.owner.push(person.iri.clone());
    for d in 0..domains {
        let mut domain = DomainRec::new(v.iri(&format!("dom{d}")));
        if d + 1 < domains {
            domain.subdomains.push(v.iri(&format!("dom{}", d + 1)));
        }
        for k in 0..docs_per_domain {
            let mut doc = DocumentRec::new(v.iri(&format!("doc{d}_{k}")));
            doc.title = Some(format!("Document {k} of domain {d}"));
            doc.doc_uri = Some(format!("{}/docs/{d}/{k}/", base.as_str()));
            doc.part_of.push(web.iri.clone());
            web.parts.push(doc.iri.clone());
            domain.documents.push(doc.iri.clone());
            m.documents.push(doc);
        }
        if d == 0 {
            web.scopes.push(domain.iri.clone());
        }
        m.domains.push(domain);
    }
    m.webs.push(web);
    m.persons.push(person);
    build_graph(&m, base, true).expect("synthetic model is consistent")
}
