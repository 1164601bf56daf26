//! Fetching per-host ontology files and merging them into one dataset.
//!
//! Fetches run concurrently; the merge always follows source order, so the
//! merged graph does not depend on which host answers first.

use std::fmt;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::time::Duration;

use indexmap::IndexMap;
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use crate::model::{BlankNode, Graph, Iri, ModelError, Subject, Term, Triple};
use crate::rdfxml::{parse_rdfxml, Diagnostic, RdfXmlError, MEDIA_TYPE};

pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;
pub const MAX_REDIRECTS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Location {
    File(PathBuf),
    Url(String),
}

impl Location {
    /// `http://` and `https://` prefixes mean a URL; anything else is a path.
    pub fn parse(text: &str) -> Location {
        let lower = text.to_ascii_lowercase();
        if lower.starts_with("http://") || lower.starts_with("https://") {
            Location::Url(text.to_string())
        } else {
            Location::File(PathBuf::from(text))
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::File(p) => write!(f, "{}", p.display()),
            Location::Url(u) => f.write_str(u),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpec {
    pub id: usize,
    pub location: Location,
    pub declared_base: Option<Iri>,
}

impl SourceSpec {
    pub fn new(id: usize, location: &str) -> Self {
        SourceSpec { id, location: Location::parse(location), declared_base: None }
    }

    /// One spec per location, numbered from 0 in the given order.
    pub fn list<S: AsRef<str>>(locations: &[S]) -> Vec<SourceSpec> {
        locations.iter().enumerate().map(|(i, l)| SourceSpec::new(i, l.as_ref())).collect()
    }

    /// The declared base, else the URL, else `file://` plus the absolute path.
    pub fn base(&self) -> Result<Iri, ModelError> {
        if let Some(b) = &self.declared_base {
            return Ok(b.clone());
        }
        match &self.location {
            Location::Url(u) => Iri::new(u.as_str()),
            Location::File(p) => {
                let abs = std::path::absolute(p).unwrap_or_else(|_| p.clone());
                let url = url::Url::from_file_path(&abs).map_err(|_| ModelError::MalformedIri {
                    text: abs.display().to_string(),
                    reason: "path cannot be expressed as a file URL",
                })?;
                Iri::new(url.as_str())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("{0}: not found")]
    NotFound(String),
    #[error("{location}: timed out after {ms} ms")]
    Timeout { location: String, ms: u64 },
    #[error("{0}: more than {MAX_REDIRECTS} redirects")]
    TooManyRedirects(String),
    #[error("{location}: {detail}")]
    TransportFailure { location: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("no sources given")]
    NoSources,
    #[error("source location {0} is listed more than once")]
    DuplicateLocation(String),
    #[error("source {source_id}: {error}")]
    Fetch { source_id: usize, error: FetchError },
    #[error("source {source_id} ({location}): {error}")]
    Parse { source_id: usize, location: String, error: RdfXmlError },
    #[error("source {source_id}: {error}")]
    Base { source_id: usize, error: ModelError },
}

impl LoadError {
    pub fn source_id(&self) -> Option<usize> {
        match self {
            LoadError::NoSources | LoadError::DuplicateLocation(_) => None,
            LoadError::Fetch { source_id, .. }
            | LoadError::Parse { source_id, .. }
            | LoadError::Base { source_id, .. } => Some(*source_id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub timeout_ms: u64,
    /// Skip failing sources instead of failing the whole load.
    pub partial: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { timeout_ms: DEFAULT_TIMEOUT_MS, partial: false }
    }
}

/// Merged graph plus every source's own graph, keyed by source id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub merged: Graph,
    pub per_source: IndexMap<usize, Graph>,
    pub sources: Vec<SourceSpec>,
}

impl Dataset {
    /// Ids of the loaded sources, in merge order.
    pub fn order(&self) -> Vec<usize> {
        self.per_source.keys().copied().collect()
    }

    pub fn source(&self, id: usize) -> Option<&SourceSpec> {
        self.sources.iter().find(|s| s.id == id)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadDiagnostics {
    /// Parser warnings, tagged with the source id.
    pub warnings: Vec<(usize, Diagnostic)>,
    /// Sources dropped in partial mode.
    pub skipped: Vec<LoadError>,
}

/// Reads a file, or GETs a URL asking for RDF/XML.
pub fn fetch(src: &SourceSpec, timeout_ms: u64) -> Result<Vec<u8>, FetchError> {
    match &src.location {
        Location::File(p) => read_file(p),
        Location::Url(u) => get(u, timeout_ms),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, FetchError> {
    std::fs::read(path).map_err(|e| {
        let location = path.display().to_string();
        match e.kind() {
            ErrorKind::NotFound => FetchError::NotFound(location),
            _ => FetchError::TransportFailure { location, detail: e.to_string() },
        }
    })
}

fn get(url: &str, timeout_ms: u64) -> Result<Vec<u8>, FetchError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(timeout_ms.max(1))))
        .max_redirects(MAX_REDIRECTS)
        .max_redirects_will_error(true)
        .http_status_as_error(false)
        .build()
        .into();
    let failure = |e: ureq::Error| match e {
        ureq::Error::Timeout(_) => FetchError::Timeout { location: url.to_string(), ms: timeout_ms },
        ureq::Error::TooManyRedirects => FetchError::TooManyRedirects(url.to_string()),
        ureq::Error::Io(ref io) if io.kind() == ErrorKind::TimedOut => {
            FetchError::Timeout { location: url.to_string(), ms: timeout_ms }
        }
        other => FetchError::TransportFailure { location: url.to_string(), detail: other.to_string() },
    };
    let mut response = agent.get(url).header("Accept", MEDIA_TYPE).call().map_err(failure)?;
    let status = response.status().as_u16();
    match status {
        200..=299 => response.body_mut().read_to_vec().map_err(failure),
        404 | 410 => Err(FetchError::NotFound(url.to_string())),
        300..=399 => Err(FetchError::TooManyRedirects(url.to_string())),
        _ => Err(FetchError::TransportFailure { location: url.to_string(), detail: format!("HTTP status {status}") }),
    }
}

/// Fetches and merges `specs` with [`fetch`].
pub fn load_sources(specs: &[SourceSpec], options: LoadOptions) -> Result<(Dataset, LoadDiagnostics), LoadError> {
    load_sources_with(specs, options, |s| fetch(s, options.timeout_ms))
}

/// Like [`load_sources`] with a caller-supplied fetcher. Fetches run on
/// scoped threads; parsing and merging happen afterwards in source order.
pub fn load_sources_with<F>(
    specs: &[SourceSpec],
    options: LoadOptions,
    fetcher: F,
) -> Result<(Dataset, LoadDiagnostics), LoadError>
where
    F: Fn(&SourceSpec) -> Result<Vec<u8>, FetchError> + Sync,
{
    if specs.is_empty() {
        return Err(LoadError::NoSources);
    }
    for (i, s) in specs.iter().enumerate() {
        if specs[..i].iter().any(|earlier| earlier.location == s.location) {
            return Err(LoadError::DuplicateLocation(s.location.to_string()));
        }
    }

    let bodies: Vec<Result<Vec<u8>, FetchError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs.iter().map(|s| scope.spawn(|| fetcher(s))).collect();
        handles.into_iter().map(|h| h.join().expect("fetch thread panicked")).collect()
    });

    let mut dataset = Dataset { sources: specs.to_vec(), ..Dataset::default() };
    let mut diagnostics = LoadDiagnostics::default();
    for (spec, body) in specs.iter().zip(bodies) {
        match parse_source(spec, body) {
            Ok((graph, warnings)) => {
                diagnostics.warnings.extend(warnings.into_iter().map(|w| (spec.id, w)));
                dataset.merged.extend_from(&graph);
                for (prefix, ns) in graph.prefixes.iter() {
                    if dataset.merged.prefixes.get(prefix).is_none() {
                        dataset.merged.prefixes.insert(prefix, ns.clone());
                    }
                }
                dataset.per_source.insert(spec.id, graph);
            }
            Err(e) if options.partial => diagnostics.skipped.push(e),
            Err(e) => return Err(e),
        }
    }
    if dataset.per_source.is_empty() {
        return Err(diagnostics.skipped.remove(0));
    }
    Ok((dataset, diagnostics))
}

fn parse_source(spec: &SourceSpec, body: Result<Vec<u8>, FetchError>) -> Result<(Graph, Vec<Diagnostic>), LoadError> {
    let body = body.map_err(|error| LoadError::Fetch { source_id: spec.id, error })?;
    let base = spec.base().map_err(|error| LoadError::Base { source_id: spec.id, error })?;
    let (graph, diagnostics) = parse_rdfxml(&body, &base).map_err(|error| LoadError::Parse {
        source_id: spec.id,
        location: spec.location.to_string(),
        error,
    })?;
    Ok((standoff(&graph, spec.id), diagnostics.warnings))
}

/// Renames every blank node `_:x` to `_:s{id}_x` so sources never share one.
pub fn standoff(g: &Graph, id: usize) -> Graph {
    let rename = |b: &BlankNode| BlankNode::new(format!("s{id}_{}", b.label())).expect("labels stay alphanumeric");
    let mut out = Graph::new();
    out.prefixes = g.prefixes.clone();
    for t in g.iter() {
        let subject = match &t.subject {
            Subject::Blank(b) => Subject::Blank(rename(b)),
            s => s.clone(),
        };
        let object = match &t.object {
            Term::Blank(b) => Term::Blank(rename(b)),
            o => o.clone(),
        };
        out.insert(Triple::new(subject, t.predicate.clone(), object));
    }
    out
}

/// Characters kept verbatim in share links: ALPHA, DIGIT and `-._~`.
const QUERY_COMPONENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// `endpoint?query=…&source=…`, with every value percent-encoded.
pub fn make_share_link<S: AsRef<str>>(endpoint: &str, query: &str, sources: &[S]) -> Result<String, ModelError> {
    let iri = Iri::new(endpoint)?;
    if !matches!(iri.scheme().to_ascii_lowercase().as_str(), "http" | "https") {
        return Err(ModelError::MalformedIri { text: endpoint.to_string(), reason: "endpoint must be an http(s) URL" });
    }
    let mut link = endpoint.to_string();
    link.push(if endpoint.contains('?') { '&' } else { '?' });
    link.push_str("query=");
    link.extend(utf8_percent_encode(query, QUERY_COMPONENT));
    for s in sources {
        link.push_str("&source=");
        link.extend(utf8_percent_encode(s.as_ref(), QUERY_COMPONENT));
    }
    Ok(link)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareLink {
    pub endpoint: String,
    pub query: String,
    pub sources: Vec<String>,
}

/// Inverse of [`make_share_link`].
pub fn decode_share_link(link: &str) -> Option<ShareLink> {
    let at = link.rmatch_indices("query=").map(|(i, _)| i).find(|&i| i > 0 && matches!(&link[i - 1..i], "?" | "&"))?;
    let endpoint = link[..at - 1].to_string();
    let mut params = link[at..].split('&');
    let query = params.next()?.strip_prefix("query=")?;
    let decode = |s: &str| percent_decode_str(s).decode_utf8().ok().map(|c| c.into_owned());
    let sources = params.map(|p| p.strip_prefix("source=").and_then(decode)).collect::<Option<Vec<_>>>()?;
    Some(ShareLink { endpoint, query: decode(query)?, sources })
}
