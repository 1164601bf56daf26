use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pwo_core::federation::decode_share_link;
use pwo_core::model::isomorphic;
use pwo_core::rdfxml::{parse_ntriples, parse_rdfxml};
use pwo_core::Iri;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn fixtures() -> Vec<String> {
    ["ist.owl", "fqh.owl", "dedi.owl"].map(fixture).to_vec()
}

fn pwo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwo")).args(args).env_remove("PWO_TIMEOUT_MS").output().expect("binary runs")
}

fn with_sources<'a>(head: &[&'a str], sources: &'a [String]) -> Vec<&'a str> {
    head.iter().copied().chain(sources.iter().map(String::as_str)).collect()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const CANONICAL: &str = "\
PREFIX ist: <http://widyagama.ac.id/istiadi/ist.owl#>
PREFIX fqh: <http://widyagama.ac.id/faqih/fqh.owl#>
PREFIX dedi: <http://widyagama.ac.id/dediusman/dedi.owl#>
SELECT ?Web ?Scope ?SubScope ?DocTitle ?location
WHERE {
  { ?Web ist:hasScope ?Scope . ?Scope ist:hasSubDomain ?SubScope .
    ?SubScope ist:consistof ?doc . ?doc ist:docTitle ?DocTitle . ?doc ist:docURI ?location }
  UNION
  { ?Web fqh:hasScope ?Scope . ?Scope fqh:hasSubDomain ?SubScope .
    ?SubScope fqh:consistof ?doc . ?doc fqh:docTitle ?DocTitle . ?doc fqh:docURI ?location }
  UNION
  { ?Web dedi:hasScope ?Scope . ?Scope dedi:hasSubDomain ?SubScope .
    ?SubScope dedi:consistof ?doc . ?doc dedi:docTitle ?DocTitle . ?doc dedi:docURI ?location }
}
";

#[test]
fn fixtures_validate_clean_even_when_strict() {
    let sources = fixtures();
    for strict in [false, true] {
        let mut args = vec!["validate"];
        if strict {
            args.push("--strict");
        }
        let out = pwo(&with_sources(&args, &sources));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout(&out).matches("0 error(s), 0 warning(s)").count(), 3);
    }
}

#[test]
fn subdomain_self_loop_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("ist.owl")).unwrap().replace(
        "<Domain rdf:ID=\"Linux_OS\">",
        "<Domain rdf:ID=\"Linux_OS\">\n    <hasSubDomain rdf:resource=\"#Linux_OS\"/>",
    );
    let path = write_temp(&dir, "loop.owl", &text);
    let out = pwo(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("subdomain-cycle"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation failed"));
}

#[test]
fn missing_source_exits_two() {
    let out = pwo(&["validate", "/nonexistent/nowhere.owl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn canonical_query_matches_contents() {
    let dir = tempfile::tempdir().unwrap();
    let q = write_temp(&dir, "q.rq", CANONICAL);
    let sources = fixtures();
    let query = pwo(&with_sources(&["query", "--query", q.to_str().unwrap()], &sources));
    let contents = pwo(&with_sources(&["contents"], &sources));
    assert_eq!(query.status.code(), Some(0));
    assert_eq!(stdout(&query), stdout(&contents));
    assert_eq!(stdout(&query).lines().count(), 7);

    let csv = pwo(&with_sources(&["query", "--query", q.to_str().unwrap(), "--format", "csv"], &sources));
    assert_eq!(stdout(&csv).lines().count(), 7);
}

#[test]
fn bad_query_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let q = write_temp(&dir, "bad.rq", "SELECT ?x WHERE { ?x ?y }");
    let out = pwo(&["query", "--query", q.to_str().unwrap(), &fixture("ist.owl")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn domain_filter_equals_post_hoc_filtering() {
    let sources = fixtures();
    let all = stdout(&pwo(&with_sources(&["contents", "--format", "tsv"], &sources)));
    let filtered = stdout(&pwo(&with_sources(&["contents", "--format", "tsv", "--domain", "Linux_OS"], &sources)));
    let keep: Vec<&str> = all
        .lines()
        .enumerate()
        .filter(|(i, l)| *i == 0 || l.split('\t').nth(1).is_some_and(|s| s.ends_with("#Linux_OS>")))
        .map(|(_, l)| l)
        .collect();
    assert_eq!(filtered.lines().collect::<Vec<_>>(), keep);
    assert_eq!(keep.len(), 7);

    let none = pwo(&with_sources(&["contents", "--domain", "Windows"], &sources));
    assert_eq!(none.status.code(), Some(0));
    assert_eq!(stdout(&none).lines().count(), 1);
}

#[test]
fn convert_to_ntriples_has_one_line_per_triple() {
    let path = fixture("fqh.owl");
    let base = Iri::new("http://widyagama.ac.id/faqih/fqh.owl").unwrap();
    let (graph, _) = parse_rdfxml(&std::fs::read(&path).unwrap(), &base).unwrap();
    let out = pwo(&["convert", &path, "--to", "ntriples"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), graph.len());
    assert!(isomorphic(&parse_ntriples(&text).unwrap(), &graph));
}

#[test]
fn convert_to_rdfxml_reparses_isomorphic() {
    for path in fixtures() {
        let out = pwo(&["convert", &path, "--to", "rdfxml"]);
        assert_eq!(out.status.code(), Some(0));
        let base = Iri::new("http://example.org/unused").unwrap();
        let (back, _) = parse_rdfxml(&out.stdout, &base).unwrap();
        let (orig, _) = parse_rdfxml(&std::fs::read(&path).unwrap(), &base).unwrap();
        assert!(isomorphic(&back, &orig), "{path}");
    }
}

#[test]
fn convert_empty_document_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "empty.rdf", "<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"/>");
    let out = pwo(&["convert", path.to_str().unwrap(), "--to", "ntriples"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn link_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let q = write_temp(&dir, "q.rq", CANONICAL);
    let sources = ["http://widyagama.ac.id/istiadi/ist.owl", "http://widyagama.ac.id/faqih/fqh.owl"];
    let out = pwo(&[
        "link",
        "--endpoint",
        "http://sparql.org/sparql",
        "--query",
        q.to_str().unwrap(),
        sources[0],
        sources[1],
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.ends_with('\n'));
    let link = decode_share_link(text.trim_end()).unwrap();
    assert_eq!(link.endpoint, "http://sparql.org/sparql");
    assert_eq!(link.query, CANONICAL);
    assert_eq!(link.sources, sources);
}

#[test]
fn timeout_flag_and_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pwo"))
        .args(["validate", &fixture("ist.owl")])
        .env("PWO_TIMEOUT_MS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "zero timeout is rejected");
    let out = Command::new(env!("CARGO_BIN_EXE_pwo"))
        .args(["--timeout-ms", "500", "validate", &fixture("ist.owl")])
        .env("PWO_TIMEOUT_MS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "flag overrides environment");
}
