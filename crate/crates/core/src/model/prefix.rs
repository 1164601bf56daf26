use indexmap::IndexMap;

use super::{is_xml_name, Iri};

/// Prefix name to namespace IRI, in registration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: IndexMap<String, Iri>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `prefix`, replacing any previous namespace for it.
    pub fn insert(&mut self, prefix: impl Into<String>, namespace: Iri) -> Option<Iri> {
        self.entries.insert(prefix.into(), namespace)
    }

    pub fn get(&self, prefix: &str) -> Option<&Iri> {
        self.entries.get(prefix)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands `prefix:local`. Returns `None` when the prefix is unknown or
    /// the text has no colon.
    pub fn expand(&self, prefixed: &str) -> Option<Iri> {
        let (prefix, local) = prefixed.split_once(':')?;
        let ns = self.entries.get(prefix)?;
        Iri::new(format!("{}{}", ns.as_str(), local)).ok()
    }

    /// Compacts `iri` using the longest matching namespace whose remainder is
    /// a valid local name (or empty).
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        self.entries
            .iter()
            .filter_map(|(p, ns)| {
                let local = iri.as_str().strip_prefix(ns.as_str())?;
                (local.is_empty() || is_xml_name(local)).then_some((p, ns.as_str().len(), local))
            })
            .max_by_key(|(_, len, _)| *len)
            .map(|(p, _, local)| format!("{p}:{local}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn expand_and_compact() {
        let mut pm = PrefixMap::new();
        pm.insert("ist", Iri::new("http://h/ist.owl#").unwrap());
        pm.insert("h", Iri::new("http://h/").unwrap());
        let iri = pm.expand("ist:Web").unwrap();
        assert_eq!(iri.as_str(), "http://h/ist.owl#Web");
        assert_eq!(pm.compact(&iri).as_deref(), Some("ist:Web"));
        assert!(pm.expand("nope:Web").is_none());
        assert!(pm.expand("Web").is_none());
    }

    proptest! {
        #[test]
        fn compact_inverts_expand(local in "[A-Za-z_][A-Za-z0-9_]{0,8}", which in 0..3usize) {
            let mut pm = PrefixMap::new();
            pm.insert("a", Iri::new("http://a.example/ns#").unwrap());
            pm.insert("b", Iri::new("http://b.example/").unwrap());
            pm.insert("c", Iri::new("urn:c:").unwrap());
            let prefix = ["a", "b", "c"][which];
            let name = format!("{prefix}:{local}");
            let iri = pm.expand(&name).unwrap();
            prop_assert_eq!(pm.compact(&iri), Some(name));
        }
    }
}
