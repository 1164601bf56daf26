//! Acceptance run: one PASS/FAIL line per criterion. Built with
//! `harness = false`, so the lines show up in plain `cargo test` output.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};

use pwo_cli::{cmd_contents, contents_table, load, Config};
use pwo_core::model::{isomorphic, parse_date, vocab};
use pwo_core::ontology::{
    build_graph, emit_schema, extract_model, validate, vocabulary_for, Class, DocumentRec, DomainRec, PersonRec,
    Property, Range, Severity, WebSite,
};
use pwo_core::rdfxml::{parse_rdfxml, parse_term, serialize_rdfxml};
use pwo_core::sparql::{
    csv_cells, evaluate, read_csv, read_json, read_tsv, read_tsv_table, read_xml, render, tsv_cells, PatternGroup,
    Projection, Row, TermPattern, TriplePattern, Variable,
};
use pwo_core::{
    BlankNode, Graph, Iri, Literal, PersonalWebModel, PrefixMap, QueryAst, ResultFormat, Subject, Term, Triple,
    Vocabulary,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 0x5eed_2010;
const FIXTURES: [&str; 3] = ["ist.owl", "fqh.owl", "dedi.owl"];

fn main() {
    let criteria: [Criterion; 7] = [
        ("content listing", table_reproduction),
        ("schema fidelity", schema_fidelity),
        ("oracle equivalence", oracle_equivalence),
        ("round-trips", round_trips),
        ("validator properties", validator_properties),
        ("federation determinism", federation_determinism),
        ("format consistency", format_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fixture_paths() -> Vec<String> {
    FIXTURES.iter().map(|f| fixture(f).display().to_string()).collect()
}

fn parse_file(name: &str) -> Graph {
    let base = Iri::new("http://example.org/fallback").unwrap();
    parse_rdfxml(&std::fs::read(fixture(name)).unwrap(), &base).unwrap().0
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. Content listing

/// The expected content listing, one row per document.
const EXPECTED_ROWS: [[&str; 5]; 6] = [
    [
        "WebofIstiadi",
        "Linux_OS",
        "Ubuntu",
        "Installing LAMP on Ubuntu 9.10",
        "http://widyagama.ac.id/istiadi/installingLAMP_Ubuntu/",
    ],
    [
        "WebofIstiadi",
        "Linux_OS",
        "Ubuntu",
        "Installing Printer driver C90",
        "http://widyagama.ac.id/istiadai/Printerdriverc90/",
    ],
    ["faqihweb", "Linux_OS", "Igos", "Membuat Web Server pada IGOS", "http://widyagama.ac.id/faqih/igos_webserver/"],
    [
        "faqihweb",
        "Linux_OS",
        "Ubuntu",
        "Dependency problem installing Web Server",
        "http://widyagama.ac.id/faqih/dependency_webserver/",
    ],
    [
        "Webofdedi",
        "Linux_OS",
        "Debian",
        "How to configure connection to Repository",
        "http://widyagama.ac.id/dediusman/debian_repo/",
    ],
    [
        "Webofdedi",
        "Linux_OS",
        "Debian",
        "How to Install web server @ Debian",
        "http://widyagama.ac.id/dediusman/Install_webserver/",
    ],
];

/// Columns padded to their widest cell, two spaces apart, literals quoted.
fn expected_listing() -> String {
    let mut rows = vec![["Web", "Scope", "SubScope", "DocTitle", "location"].map(String::from)];
    for r in EXPECTED_ROWS {
        rows.push([r[0].into(), r[1].into(), r[2].into(), format!("\"{}\"", r[3]), format!("\"{}\"", r[4])]);
    }
    let widths: Vec<usize> = (0..5).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap()).collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn table_reproduction() -> Check {
    let start = Instant::now();
    let outcome =
        cmd_contents(&fixture_paths(), None, ResultFormat::Text, &Config::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(outcome.code == 0, || format!("exit {}", outcome.code))?;
    let expected = expected_listing();
    ensure(outcome.stdout == expected, || format!("got\n{}\nexpected\n{expected}", outcome.stdout))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("6 rows, exact text match, {} ms", elapsed.as_millis()))
}

// ---------------------------------------------------------------------------
// 2. Schema

const LISTINGS_BASE: &str = "http://example.org/personal/web.owl";

/// (property, is object property, domain, range) as declared in the listings.
const DECLARED: [(&str, bool, &str, &str); 20] = [
    ("owner", true, "Web", "Person"),
    ("hasPart", true, "Web", "Documents"),
    ("hasScope", true, "Web", "Domain"),
    ("webAbout", false, "Web", "xsd:string"),
    ("webTitle", false, "Web", "xsd:string"),
    ("interest", true, "Person", "Domain"),
    ("Author", true, "Documents", "Person"),
    ("prsMbox", false, "Person", "xsd:string"),
    ("consistof", true, "Domain", "Documents"),
    ("hasSubDomain", true, "Domain", "Domain"),
    ("domDescription", false, "Domain", "xsd:string"),
    ("docURI", false, "Documents", "xsd:string"),
    ("isPartOf", true, "Documents", "Web"),
    ("Creator", true, "Documents", "Person"),
    ("docDate", false, "Documents", "xsd:date"),
    ("docDescription", false, "Documents", "xsd:string"),
    ("docLink", false, "Documents", "xsd:string"),
    ("docPublish", false, "Documents", "xsd:string"),
    ("docTitle", false, "Documents", "xsd:string"),
    ("docType", false, "Documents", "xsd:string"),
];

fn hand_schema() -> Graph {
    let ns = |local: &str| Iri::new(format!("{LISTINGS_BASE}#{local}")).unwrap();
    let iri = |s: &str| Iri::new(s).unwrap();
    let ty = iri(vocab::RDF_TYPE);
    let mut g = Graph::new();
    for class in ["Web", "Person", "Domain", "Documents"] {
        g.insert(Triple::new(ns(class), ty.clone(), iri(vocab::OWL_CLASS)));
    }
    for (name, object, domain, range) in DECLARED {
        let kind = if object { vocab::OWL_OBJECT_PROPERTY } else { vocab::OWL_DATATYPE_PROPERTY };
        g.insert(Triple::new(ns(name), ty.clone(), iri(kind)));
        g.insert(Triple::new(ns(name), iri(vocab::RDFS_DOMAIN), ns(domain)));
        let range = match range.strip_prefix("xsd:") {
            Some(local) => iri(&format!("{}{local}", vocab::XSD)),
            None => ns(range),
        };
        g.insert(Triple::new(ns(name), iri(vocab::RDFS_RANGE), range));
    }
    g.insert(Triple::new(ns("hasPart"), iri(vocab::OWL_INVERSE_OF), ns("isPartOf")));
    g.insert(Triple::new(ns("isPartOf"), iri(vocab::OWL_INVERSE_OF), ns("hasPart")));
    g.insert(Triple::new(ns("webTitle"), iri(vocab::RDFS_COMMENT), Literal::lang_tagged("null", "en").unwrap()));
    g
}

fn schema_fidelity() -> Check {
    let base = Iri::new(LISTINGS_BASE).unwrap();
    let written = serialize_rdfxml(&emit_schema(&base), &base);
    let emitted = parse_rdfxml(written.as_bytes(), &base).map_err(|e| e.to_string())?.0;
    let listings = parse_file("listings.rdf");
    let hand = hand_schema();
    ensure(isomorphic(&emitted, &listings), || "emitted schema differs from the parsed listings".into())?;
    ensure(isomorphic(&emitted, &hand), || "emitted schema differs from the hand-written table".into())?;

    let count = |p: &str| emitted.iter().filter(|t| t.predicate.as_str() == p).count();
    let (domains, ranges) = (count(vocab::RDFS_DOMAIN), count(vocab::RDFS_RANGE));
    ensure(domains == 20 && ranges == 20, || format!("{domains} domain and {ranges} range declarations"))?;
    let inverse = Triple::new(
        Iri::new(format!("{LISTINGS_BASE}#hasPart")).unwrap(),
        Iri::new(vocab::OWL_INVERSE_OF).unwrap(),
        Iri::new(format!("{LISTINGS_BASE}#isPartOf")).unwrap(),
    );
    ensure(emitted.contains(&inverse), || "hasPart owl:inverseOf isPartOf missing".into())?;
    Ok(format!("{} triples isomorphic to listings and hand table; 20 domain/range pairs", emitted.len()))
}

// ---------------------------------------------------------------------------
// 3. Evaluator against brute force

const VARS: [&str; 4] = ["a", "b", "c", "d"];

struct Pools {
    subjects: Vec<Term>,
    predicates: Vec<Term>,
    objects: Vec<Term>,
}

fn pools() -> Pools {
    let ex = |s: &str| Term::Iri(Iri::new(format!("http://example.org/{s}")).unwrap());
    let blank = |s: &str| Term::Blank(BlankNode::new(s).unwrap());
    let subjects: Vec<Term> = vec![ex("a"), ex("b"), ex("c"), ex("d"), blank("b1"), blank("b2")];
    let predicates = vec![ex("p"), ex("q"), ex("r")];
    let mut objects = subjects.clone();
    objects.extend([
        Term::Literal(Literal::simple("x")),
        Term::Literal(Literal::simple("y")),
        Term::Literal(Literal::lang_tagged("x", "en").unwrap()),
        Term::Literal(Literal::typed("1", Iri::new(format!("{}integer", vocab::XSD)).unwrap()).unwrap()),
        ex("p"),
    ]);
    Pools { subjects, predicates, objects }
}

fn random_graph(rng: &mut StdRng, p: &Pools) -> Graph {
    let mut g = Graph::new();
    for _ in 0..rng.random_range(0..=30) {
        let s = p.subjects.choose(rng).unwrap().to_subject().unwrap();
        let Term::Iri(pred) = p.predicates.choose(rng).unwrap().clone() else { unreachable!() };
        g.insert(Triple::new(s, pred, p.objects.choose(rng).unwrap().clone()));
    }
    g
}

fn random_position(rng: &mut StdRng, pool: &[Term]) -> TermPattern {
    if rng.random_bool(0.6) {
        TermPattern::Var(Variable::new(*VARS.choose(rng).unwrap()).unwrap())
    } else {
        TermPattern::Term(pool.choose(rng).unwrap().clone())
    }
}

fn random_query(rng: &mut StdRng, p: &Pools) -> QueryAst {
    let branches: Vec<PatternGroup> = (0..rng.random_range(1..=2))
        .map(|_| {
            let patterns = (0..rng.random_range(1..=3))
                .map(|_| {
                    let s = random_position(rng, &p.subjects);
                    let pr = random_position(rng, &p.predicates);
                    let o = random_position(rng, &p.objects);
                    TriplePattern::new(s, pr, o).unwrap()
                })
                .collect();
            PatternGroup::Bgp(patterns)
        })
        .collect();
    let projection = if rng.random_bool(0.3) {
        Projection::All
    } else {
        let mut vars: Vec<Variable> =
            VARS.iter().filter(|_| rng.random_bool(0.6)).map(|v| Variable::new(*v).unwrap()).collect();
        if vars.is_empty() {
            vars.push(Variable::new("a").unwrap());
        }
        vars.shuffle(rng);
        Projection::Vars(vars)
    };
    QueryAst { prefixes: PrefixMap::new(), projection, where_clause: PatternGroup::union_all(branches).unwrap() }
}

fn bgp_patterns(g: &PatternGroup) -> Vec<&TriplePattern> {
    match g {
        PatternGroup::Bgp(ps) => ps.iter().collect(),
        other => panic!("unexpected branch shape {other:?}"),
    }
}

/// Every assignment of the branch's variables to graph terms, kept when
/// each instantiated pattern is a graph triple.
fn brute_force(q: &QueryAst, g: &Graph) -> Vec<Row> {
    let mut universe: Vec<Term> = Vec::new();
    for t in g.iter() {
        for term in [Term::from(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()] {
            if !universe.contains(&term) {
                universe.push(term);
            }
        }
    }
    let header = q.header();
    let mut rows = Vec::new();
    for branch in q.where_clause.union_branches() {
        let patterns = bgp_patterns(branch);
        let mut vars: Vec<&Variable> = Vec::new();
        for p in &patterns {
            for v in p.positions().into_iter().filter_map(TermPattern::as_var) {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let total = universe.len().pow(vars.len() as u32);
        for mut code in 0..total {
            let mut mapping: HashMap<&Variable, &Term> = HashMap::new();
            for v in &vars {
                mapping.insert(*v, &universe[code % universe.len()]);
                code /= universe.len();
            }
            let value = |tp: &TermPattern| match tp {
                TermPattern::Var(v) => mapping[v].clone(),
                TermPattern::Term(t) => t.clone(),
            };
            let holds = patterns.iter().all(|p| {
                let (Some(s), Term::Iri(pred)) = (value(&p.subject).to_subject(), value(&p.predicate)) else {
                    return false;
                };
                g.contains(&Triple::new(s, pred, value(&p.object)))
            });
            if holds {
                rows.push(header.iter().map(|v| mapping.get(v).map(|t| (*t).clone())).collect());
            }
        }
    }
    rows
}

fn as_bag(rows: &[Row]) -> Vec<String> {
    let mut keys: Vec<String> = rows.iter().map(|r| format!("{r:?}")).collect();
    keys.sort();
    keys
}

fn oracle_equivalence() -> Check {
    const CASES: usize = 150;
    let mut rng = StdRng::seed_from_u64(SEED);
    let p = pools();
    let start = Instant::now();
    let mut nonempty = 0;
    for case in 0..CASES {
        let g = random_graph(&mut rng, &p);
        let q = random_query(&mut rng, &p);
        let got = evaluate(&q, &g);
        let expected = brute_force(&q, &g);
        ensure(got.header == q.header(), || format!("case {case}: header mismatch"))?;
        ensure(as_bag(&got.rows) == as_bag(&expected), || {
            format!("case {case}: {} rows vs oracle {} for {q}", got.rows.len(), expected.len())
        })?;
        nonempty += usize::from(!expected.is_empty());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{CASES} cases ({nonempty} non-empty), 0 mismatches, {} ms", elapsed.as_millis()))
}

// ---------------------------------------------------------------------------
// 4. Round-trips

fn random_text(rng: &mut StdRng) -> String {
    const CHARS: &[char] = &['a', 'b', 'X', 'Z', '0', '9', ' ', '<', '>', '&', '"', '\'', 'é', '\t', '\n', '€'];
    let len = rng.random_range(1..8);
    let mut s: String = (0..len).map(|_| *CHARS.choose(rng).unwrap()).collect();
    s.insert(0, 'w');
    s
}

/// A graph inside the subset RDF/XML can carry without `rdf:nodeID`: each
/// blank node is the object of at most one triple, and only of a subject
/// that cannot be reached from it.
fn random_rdf_graph(rng: &mut StdRng) -> Graph {
    const BLANKS: usize = 4;
    let ns = "http://example.org/v#";
    let blank = |i: usize| BlankNode::new(format!("n{i}")).unwrap();
    let mut used_as_object = [false; BLANKS];
    let mut g = Graph::new();
    for _ in 0..rng.random_range(0..25) {
        let blank_subject = rng.random_bool(0.25).then(|| rng.random_range(0..BLANKS));
        let s: Subject = match blank_subject {
            Some(i) => blank(i).into(),
            None => Iri::new(format!("http://example.org/r/{}", rng.random_range(0..6))).unwrap().into(),
        };
        let predicate = if rng.random_bool(0.15) {
            Iri::new(vocab::RDF_TYPE).unwrap()
        } else {
            Iri::new(format!("{ns}p{}", rng.random_range(0..5))).unwrap()
        };
        let object: Term = match rng.random_range(0..7) {
            0 => Iri::new(format!("http://example.org/r/{}", rng.random_range(0..6))).unwrap().into(),
            1 => {
                let lowest = blank_subject.map_or(0, |i| i + 1);
                match (lowest..BLANKS).find(|i| !used_as_object[*i]) {
                    Some(i) => {
                        used_as_object[i] = true;
                        blank(i).into()
                    }
                    None => Literal::simple(random_text(rng)).into(),
                }
            }
            2 => Literal::simple(random_text(rng)).into(),
            3 => Literal::lang_tagged(random_text(rng), *["en", "id", "en-US"].choose(rng).unwrap()).unwrap().into(),
            4 => Literal::typed(
                rng.random_range(-50..50).to_string(),
                Iri::new(format!("{}integer", vocab::XSD)).unwrap(),
            )
            .unwrap()
            .into(),
            5 => {
                let text = format!(
                    "20{:02}-0{}-1{}",
                    rng.random_range(0..30),
                    rng.random_range(1..10),
                    rng.random_range(0..10)
                );
                Literal::typed(text, Iri::new(vocab::XSD_DATE).unwrap()).unwrap().into()
            }
            _ => Iri::new(format!("{ns}C{}", rng.random_range(0..3))).unwrap().into(),
        };
        g.insert(Triple::new(s, predicate, object));
    }
    g
}

fn picks(rng: &mut StdRng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.4)).collect()
}

fn opt_text(rng: &mut StdRng) -> Option<String> {
    rng.random_bool(0.6).then(|| {
        let len = rng.random_range(0..12);
        (0..len).map(|_| *b"abcXYZ 0189.:/@-".choose(rng).unwrap() as char).collect()
    })
}

fn random_model(rng: &mut StdRng, v: &Vocabulary) -> PersonalWebModel {
    let (nw, np, nd, ndoc) =
        (rng.random_range(1..3), rng.random_range(1..3), rng.random_range(1..4), rng.random_range(0..5));
    let id = |kind: &str, i: usize| v.iri(&format!("{kind}{i}"));
    let ids = |kind: &str, list: Vec<usize>| list.into_iter().map(|i| id(kind, i)).collect::<Vec<_>>();
    let mut m = PersonalWebModel::default();
    for i in 0..nw {
        let mut w = WebSite::new(id("web", i));
        w.title = opt_text(rng);
        w.about = opt_text(rng);
        w.owner = ids("person", picks(rng, np));
        w.scopes = ids("dom", picks(rng, nd));
        w.parts = ids("doc", picks(rng, ndoc));
        m.webs.push(w);
    }
    for i in 0..np {
        let mut p = PersonRec::new(id("person", i));
        p.mbox = opt_text(rng);
        p.interests = ids("dom", picks(rng, nd));
        m.persons.push(p);
    }
    for i in 0..nd {
        let mut d = DomainRec::new(id("dom", i));
        d.description = opt_text(rng);
        d.subdomains = ids("dom", picks(rng, nd));
        d.documents = ids("doc", picks(rng, ndoc));
        m.domains.push(d);
    }
    for i in 0..ndoc {
        let mut d = DocumentRec::new(id("doc", i));
        d.doc_uri = opt_text(rng);
        d.title = opt_text(rng);
        d.doc_type = opt_text(rng);
        d.description = opt_text(rng);
        d.link = opt_text(rng);
        d.publish = opt_text(rng);
        if rng.random_bool(0.5) {
            let text = format!(
                "{}-{:02}-{:02}",
                rng.random_range(1990..2030),
                rng.random_range(1..13),
                rng.random_range(1..29)
            );
            d.date = parse_date(&text);
        }
        d.creators = ids("person", picks(rng, np));
        d.authors = ids("person", picks(rng, np));
        d.part_of = ids("web", picks(rng, nw));
        for a in &d.authors {
            m.persons.iter_mut().find(|p| p.iri == *a).unwrap().authored.push(d.iri.clone());
        }
        m.documents.push(d);
    }
    m
}

fn round_trips() -> Check {
    let base = Iri::new("http://example.org/round/trip.owl").unwrap();
    for name in FIXTURES.iter().copied().chain(["listings.rdf"]) {
        let g = parse_file(name);
        let back = parse_rdfxml(serialize_rdfxml(&g, &base).as_bytes(), &base).map_err(|e| format!("{name}: {e}"))?.0;
        ensure(isomorphic(&g, &back), || format!("{name} is not preserved"))?;
    }

    let mut rng = StdRng::seed_from_u64(SEED + 4);
    for case in 0..50 {
        let g = random_rdf_graph(&mut rng);
        let text = serialize_rdfxml(&g, &base);
        let back = parse_rdfxml(text.as_bytes(), &base).map_err(|e| format!("graph {case}: {e}\n{text}"))?.0;
        ensure(isomorphic(&g, &back), || format!("graph {case} is not preserved:\n{text}"))?;
    }

    let v = vocabulary_for(&base);
    let schema_len = emit_schema(&base).len();
    for case in 0..50 {
        let m = random_model(&mut rng, &v);
        let with_schema = case % 2 == 0;
        let g = build_graph(&m, &base, with_schema).map_err(|e| format!("model {case}: {e}"))?;
        let mut back = extract_model(&g, &base).map_err(|e| format!("model {case}: {e}"))?;
        // Schema triples describe no individual, so extraction skips them.
        let skipped = std::mem::take(&mut back.ignored_triples);
        ensure(skipped == if with_schema { schema_len } else { 0 }, || format!("model {case}: {skipped} ignored"))?;
        ensure(back == m, || format!("model {case} differs after extraction"))?;
    }
    Ok("4 fixtures, 50 random graphs, 50 random models; 0 failures".into())
}

// ---------------------------------------------------------------------------
// 5. Validator

struct Site {
    name: &'static str,
    graph: Graph,
    vocabulary: Vocabulary,
    members: HashMap<Class, Vec<Iri>>,
}

fn sites() -> Vec<Site> {
    FIXTURES
        .iter()
        .map(|name| {
            let graph = parse_file(name);
            let vocabulary = Vocabulary::detect(&graph).expect("fixture namespace");
            let m = extract_model(&graph, &vocabulary.base()).expect("fixture model");
            let members = HashMap::from([
                (Class::Web, m.webs.iter().map(|x| x.iri.clone()).collect()),
                (Class::Person, m.persons.iter().map(|x| x.iri.clone()).collect()),
                (Class::Domain, m.domains.iter().map(|x| x.iri.clone()).collect()),
                (Class::Documents, m.documents.iter().map(|x| x.iri.clone()).collect()),
            ]);
            Site { name, graph, vocabulary, members }
        })
        .collect()
}

fn member(site: &Site, class: Class, rng: &mut StdRng) -> Iri {
    site.members[&class].choose(rng).unwrap().clone()
}

fn filler(site: &Site, p: Property, rng: &mut StdRng) -> Term {
    match p.range() {
        Range::Class(c) => member(site, c, rng).into(),
        Range::Datatype(_) if p == Property::DocDate => Literal::date(parse_date("2011-05-06").unwrap()).into(),
        Range::Datatype(_) => Literal::simple("seeded").into(),
    }
}

fn seed_domain_violation(site: &Site, rng: &mut StdRng) -> Graph {
    let p = *Property::ALL.choose(rng).unwrap();
    let wrong: Vec<Class> = Class::ALL.into_iter().filter(|c| *c != p.domain()).collect();
    let subject = member(site, *wrong.choose(rng).unwrap(), rng);
    let mut g = site.graph.clone();
    g.insert(Triple::new(subject, site.vocabulary.property_iri(p), filler(site, p, rng)));
    g
}

fn seed_range_violation(site: &Site, rng: &mut StdRng) -> Graph {
    let p = *Property::ALL.choose(rng).unwrap();
    let subject = member(site, p.domain(), rng);
    let object: Term = match p.range() {
        Range::Class(c) if rng.random_bool(0.7) => {
            let wrong: Vec<Class> = Class::ALL.into_iter().filter(|x| *x != c).collect();
            member(site, *wrong.choose(rng).unwrap(), rng).into()
        }
        Range::Class(_) => Literal::simple("not a resource").into(),
        Range::Datatype(_) => member(site, *Class::ALL.choose(rng).unwrap(), rng).into(),
    };
    let mut g = site.graph.clone();
    g.insert(Triple::new(subject, site.vocabulary.property_iri(p), object));
    g
}

fn seed_cycle(site: &Site, rng: &mut StdRng) -> Graph {
    let domains = &site.members[&Class::Domain];
    let k = rng.random_range(1..=domains.len().min(3));
    let ring: Vec<Iri> = domains.choose_multiple(rng, k).cloned().collect();
    let mut g = site.graph.clone();
    for (i, d) in ring.iter().enumerate() {
        let next = ring[(i + 1) % k].clone();
        g.insert(Triple::new(d.clone(), site.vocabulary.property_iri(Property::HasSubDomain), next));
    }
    g
}

fn seed_missing_inverse(site: &Site, rng: &mut StdRng) -> Graph {
    let pair = [site.vocabulary.property_iri(Property::HasPart), site.vocabulary.property_iri(Property::IsPartOf)];
    let candidates: Vec<&Triple> = site.graph.iter().filter(|t| pair.contains(&t.predicate)).collect();
    let dropped = (*candidates.choose(rng).expect("fixture links documents to webs")).clone();
    let mut g = Graph::new();
    for t in site.graph.iter().filter(|t| **t != dropped) {
        g.insert(t.clone());
    }
    g
}

/// Rewrites one docDate in the source text, then parses it as a user would.
fn seed_bad_date(site: &Site, rng: &mut StdRng) -> Graph {
    const BAD: [&str; 6] = ["2010-13-01", "2010-02-30", "12/03/2010", "2010-3-7", "yesterday", "20100312"];
    let date = site.vocabulary.property_iri(Property::DocDate);
    let dates: Vec<&str> = site
        .graph
        .iter()
        .filter(|t| t.predicate == date)
        .filter_map(|t| t.object.as_literal().map(|l| l.lexical()))
        .collect();
    let original = dates.choose(rng).expect("fixture documents are dated");
    let text = std::fs::read_to_string(fixture(site.name)).unwrap();
    let needle = format!(">{original}</docDate>");
    assert!(text.contains(&needle), "{} has no {needle}", site.name);
    let mutated = text.replacen(&needle, &format!(">{}</docDate>", BAD.choose(rng).unwrap()), 1);
    parse_rdfxml(mutated.as_bytes(), &site.vocabulary.base()).expect("still well-formed").0
}

fn validator_properties() -> Check {
    let sites = sites();
    for site in &sites {
        for strict in [false, true] {
            let report = validate(&site.graph, &site.vocabulary.base(), strict);
            ensure(report.findings.is_empty(), || format!("{} (strict {strict}) reports:\n{report}", site.name))?;
        }
    }

    type Seeder = fn(&Site, &mut StdRng) -> Graph;
    let classes: [(&str, Seeder, bool); 5] = [
        ("domain-violation", seed_domain_violation, false),
        ("range-violation", seed_range_violation, false),
        ("subdomain-cycle", seed_cycle, false),
        ("missing-inverse", seed_missing_inverse, true),
        ("invalid-date", seed_bad_date, false),
    ];
    let mut rng = StdRng::seed_from_u64(SEED + 5);
    for (code, seed, strict) in classes {
        for case in 0..10 {
            let site = sites.choose(&mut rng).unwrap();
            let g = seed(site, &mut rng);
            let report = validate(&g, &site.vocabulary.base(), strict);
            let errors: Vec<&str> = report.errors().map(|f| f.code).collect();
            ensure(errors.contains(&code), || format!("{code} case {case} on {} not detected:\n{report}", site.name))?;
            ensure(errors.iter().all(|c| *c == code), || format!("{code} case {case}: extra errors:\n{report}"))?;
            ensure(report.findings.iter().filter(|f| f.code == code).all(|f| f.severity == Severity::Error), || {
                format!("{code} case {case}: wrong severity")
            })?;
        }
    }
    Ok("clean fixtures have 0 findings; 5 defect classes x 10 seeded cases all detected".into())
}

// ---------------------------------------------------------------------------
// 6. Federation over HTTP

struct Harness {
    root: String,
    delays: Arc<Mutex<HashMap<String, u64>>>,
    served: Arc<Mutex<Vec<String>>>,
}

fn start_harness() -> Harness {
    let server = tiny_http::Server::http("127.0.0.1:0").expect("loopback server");
    let root = format!("http://{}", server.server_addr().to_ip().unwrap());
    let delays: Arc<Mutex<HashMap<String, u64>>> = Arc::default();
    let served: Arc<Mutex<Vec<String>>> = Arc::default();
    let (d, s) = (delays.clone(), served.clone());
    thread::spawn(move || {
        for request in server.incoming_requests() {
            let (delays, served) = (d.clone(), s.clone());
            thread::spawn(move || {
                let name = request.url().split('?').next().unwrap().trim_start_matches('/').to_string();
                let wait = delays.lock().unwrap().get(&name).copied().unwrap_or(0);
                thread::sleep(Duration::from_millis(wait));
                let body = std::fs::read(fixture(&name)).unwrap_or_default();
                served.lock().unwrap().push(name);
                let header = tiny_http::Header::from_bytes("Content-Type", "application/rdf+xml").unwrap();
                let _ = request.respond(tiny_http::Response::from_data(body).with_header(header));
            });
        }
    });
    Harness { root, delays, served }
}

fn federation_determinism() -> Check {
    let config = Config::default();
    let (by_file, _) = load(&fixture_paths(), &config).map_err(|e| format!("{e:#}"))?;
    let file_rows = render(&contents_table(&by_file, None).map_err(|e| e.to_string())?, ResultFormat::Tsv);
    let file_triples: Vec<&Triple> = by_file.merged.iter().collect();

    let harness = start_harness();
    let urls: Vec<String> = FIXTURES.iter().map(|f| format!("{}/{f}", harness.root)).collect();
    let mut rng = StdRng::seed_from_u64(SEED + 6);
    let mut orders = Vec::new();
    for round in 0..10 {
        let mut steps = [0u64, 60, 120];
        steps.shuffle(&mut rng);
        *harness.delays.lock().unwrap() = FIXTURES.iter().map(|f| f.to_string()).zip(steps).collect();
        harness.served.lock().unwrap().clear();

        let (by_http, _) = load(&urls, &config).map_err(|e| format!("round {round}: {e:#}"))?;
        let http_triples: Vec<&Triple> = by_http.merged.iter().collect();
        ensure(http_triples == file_triples, || format!("round {round}: merged graphs differ"))?;
        let rows = render(&contents_table(&by_http, None).map_err(|e| e.to_string())?, ResultFormat::Tsv);
        ensure(rows == file_rows, || format!("round {round}: query output differs"))?;
        orders.push(harness.served.lock().unwrap().join(","));
    }
    orders.sort();
    orders.dedup();
    ensure(orders.len() > 1, || "fetch completion order never varied".into())?;
    Ok(format!("10 rounds, {} distinct completion orders, identical graphs and output", orders.len()))
}

// ---------------------------------------------------------------------------
// 7. Result formats

fn format_consistency() -> Check {
    let (dataset, _) = load(&fixture_paths(), &Config::default()).map_err(|e| format!("{e:#}"))?;
    let table = contents_table(&dataset, None).map_err(|e| e.to_string())?;
    ensure(table.len() == 6, || format!("{} rows", table.len()))?;

    let text = |f| render(&table, f);
    let err = |f: &'static str| move |e: pwo_core::QueryError| format!("{f}: {e}");
    let json = read_json(&text(ResultFormat::Json)).map_err(err("json"))?;
    let xml = read_xml(&text(ResultFormat::Xml)).map_err(err("xml"))?;
    let tsv = read_tsv_table(&text(ResultFormat::Tsv)).map_err(err("tsv"))?;
    for (name, back) in [("json", &json), ("xml", &xml), ("tsv", &tsv)] {
        ensure(*back == table, || format!("{name} bindings differ"))?;
    }

    let csv = read_csv(&text(ResultFormat::Csv)).map_err(err("csv"))?;
    ensure(csv == csv_cells(&table), || "csv cell matrix differs".into())?;
    let tsv_matrix = read_tsv(&text(ResultFormat::Tsv)).map_err(err("tsv"))?;
    ensure(tsv_matrix == tsv_cells(&table), || "tsv cell matrix differs".into())?;
    ensure(csv.len() == 7 && tsv_matrix.len() == 7, || "header plus 6 rows expected".into())?;

    // Both matrices name the same terms: csv carries lexical forms, tsv N-Triples.
    for (c, t) in csv.iter().skip(1).flatten().zip(tsv_matrix.iter().skip(1).flatten()) {
        let term = parse_term(t).map_err(|e| format!("tsv cell {t:?}: {e}"))?;
        let lexical = match &term {
            Term::Iri(i) => i.as_str(),
            Term::Literal(l) => l.lexical(),
            Term::Blank(b) => b.label(),
        };
        ensure(c == lexical, || format!("csv {c:?} vs tsv {t:?}"))?;
    }
    Ok("csv, tsv, json, xml carry the same 6 bindings; csv/tsv matrices re-parse exactly".into())
}
