use std::fmt;
use std::str::FromStr;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde_json::{json, Map, Value};

use crate::model::{BlankNode, Iri, Literal, Term};
use crate::rdfxml::parse_term;

use super::ast::Variable;
use super::eval::SolutionTable;
use super::QueryError;

const RESULTS_NS: &str = "http://www.w3.org/2005/sparql-results#";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ResultFormat {
    #[default]
    Text,
    Csv,
    Tsv,
    Json,
    Xml,
}

impl ResultFormat {
    pub const ALL: [ResultFormat; 5] =
        [ResultFormat::Text, ResultFormat::Csv, ResultFormat::Tsv, ResultFormat::Json, ResultFormat::Xml];

    pub fn name(self) -> &'static str {
        match self {
            ResultFormat::Text => "text",
            ResultFormat::Csv => "csv",
            ResultFormat::Tsv => "tsv",
            ResultFormat::Json => "json",
            ResultFormat::Xml => "xml",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            ResultFormat::Text => "text/plain",
            ResultFormat::Csv => "text/csv",
            ResultFormat::Tsv => "text/tab-separated-values",
            ResultFormat::Json => "application/sparql-results+json",
            ResultFormat::Xml => "application/sparql-results+xml",
        }
    }
}

impl fmt::Display for ResultFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ResultFormat {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResultFormat::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QueryError::UnknownFormat(s.to_string()))
    }
}

/// Serializes `t` in `format`. Every format ends with a newline and lists
/// rows in table order.
pub fn render(t: &SolutionTable, format: ResultFormat) -> String {
    match format {
        ResultFormat::Text => render_text(t),
        ResultFormat::Csv => render_csv(t),
        ResultFormat::Tsv => render_tsv(t),
        ResultFormat::Json => render_json(t),
        ResultFormat::Xml => render_xml(t),
    }
}

/// Display form used by the text table: IRIs by local name, literals quoted.
pub fn display_cell(term: Option<&Term>) -> String {
    match term {
        None => String::new(),
        Some(Term::Iri(i)) => i.local_name().to_string(),
        Some(Term::Blank(b)) => b.to_string(),
        Some(Term::Literal(l)) => match l.lang() {
            Some(lang) => format!("\"{}\"@{lang}", l.lexical()),
            None => format!("\"{}\"", l.lexical()),
        },
    }
}

fn render_text(t: &SolutionTable) -> String {
    let mut grid: Vec<Vec<String>> = vec![t.header.iter().map(|v| v.name().to_string()).collect()];
    grid.extend(t.rows.iter().map(|row| row.iter().map(|c| display_cell(c.as_ref())).collect()));
    let widths: Vec<usize> =
        (0..t.header.len()).map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &grid {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            line.extend(std::iter::repeat_n(' ', widths[c] - cell.chars().count()));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Cells as written to CSV: full IRIs, lexical forms, `_:label` blanks.
pub fn csv_cells(t: &SolutionTable) -> Vec<Vec<String>> {
    let mut out = vec![t.header.iter().map(|v| v.name().to_string()).collect()];
    out.extend(t.rows.iter().map(|row| {
        row.iter()
            .map(|c| match c {
                None => String::new(),
                Some(Term::Iri(i)) => i.as_str().to_string(),
                Some(Term::Blank(b)) => b.to_string(),
                Some(Term::Literal(l)) => l.lexical().to_string(),
            })
            .collect()
    }));
    out
}

/// Cells as written to TSV: `?var` headers and N-Triples terms.
pub fn tsv_cells(t: &SolutionTable) -> Vec<Vec<String>> {
    let mut out = vec![t.header.iter().map(|v| v.to_string()).collect()];
    out.extend(
        t.rows.iter().map(|row| row.iter().map(|c| c.as_ref().map(Term::to_string).unwrap_or_default()).collect()),
    );
    out
}

fn render_csv(t: &SolutionTable) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for record in csv_cells(t) {
        w.write_record(&record).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv of UTF-8 cells")
}

fn render_tsv(t: &SolutionTable) -> String {
    let mut out = String::new();
    for record in tsv_cells(t) {
        out.push_str(&record.join("\t"));
        out.push('\n');
    }
    out
}

fn json_term(term: &Term) -> Value {
    match term {
        Term::Iri(i) => json!({"type": "uri", "value": i.as_str()}),
        Term::Blank(b) => json!({"type": "bnode", "value": b.label()}),
        Term::Literal(l) => {
            let mut m = Map::new();
            m.insert("type".into(), "literal".into());
            m.insert("value".into(), l.lexical().into());
            if let Some(lang) = l.lang() {
                m.insert("xml:lang".into(), lang.into());
            }
            if let Some(dt) = l.datatype() {
                m.insert("datatype".into(), dt.as_str().into());
            }
            Value::Object(m)
        }
    }
}

fn render_json(t: &SolutionTable) -> String {
    let bindings: Vec<Value> = t
        .rows
        .iter()
        .map(|row| {
            let m: Map<String, Value> = t
                .header
                .iter()
                .zip(row)
                .filter_map(|(v, c)| c.as_ref().map(|term| (v.name().to_string(), json_term(term))))
                .collect();
            Value::Object(m)
        })
        .collect();
    let vars: Vec<&str> = t.header.iter().map(Variable::name).collect();
    let doc = json!({"head": {"vars": vars}, "results": {"bindings": bindings}});
    let mut out = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    out.push('\n');
    out
}

fn escape_xml(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

fn render_xml(t: &SolutionTable) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!("<sparql xmlns=\"{RESULTS_NS}\">\n  <head>\n"));
    for v in &t.header {
        out.push_str(&format!("    <variable name=\"{}\"/>\n", v.name()));
    }
    out.push_str("  </head>\n  <results>\n");
    for row in &t.rows {
        out.push_str("    <result>\n");
        for (v, cell) in t.header.iter().zip(row) {
            let Some(term) = cell else { continue };
            let value = match term {
                Term::Iri(i) => format!("<uri>{}</uri>", escape_xml(i.as_str())),
                Term::Blank(b) => format!("<bnode>{}</bnode>", escape_xml(b.label())),
                Term::Literal(l) => {
                    let attr = match (l.lang(), l.datatype()) {
                        (Some(lang), _) => format!(" xml:lang=\"{}\"", escape_xml(lang)),
                        (None, Some(dt)) => format!(" datatype=\"{}\"", escape_xml(dt.as_str())),
                        (None, None) => String::new(),
                    };
                    format!("<literal{attr}>{}</literal>", escape_xml(l.lexical()))
                }
            };
            out.push_str(&format!("      <binding name=\"{}\">{value}</binding>\n", v.name()));
        }
        out.push_str("    </result>\n");
    }
    out.push_str("  </results>\n</sparql>\n");
    out
}

fn malformed(format: ResultFormat, detail: impl fmt::Display) -> QueryError {
    QueryError::MalformedResults { format: format.name(), detail: detail.to_string() }
}

/// Reads CSV output back into its cell matrix, header included.
pub fn read_csv(text: &str) -> Result<Vec<Vec<String>>, QueryError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let cells = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()).map_err(|e| malformed(ResultFormat::Csv, e)))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok(zero_width(cells))
}

/// A header with no variables is written as one empty field per line;
/// variable names are never empty, so such a header means zero columns.
fn zero_width(mut cells: Vec<Vec<String>>) -> Vec<Vec<String>> {
    if cells.first().is_some_and(|h| h.len() == 1 && h[0].is_empty()) {
        cells.iter_mut().for_each(Vec::clear);
    }
    cells
}

/// Reads TSV output back into its cell matrix, header included.
pub fn read_tsv(text: &str) -> Result<Vec<Vec<String>>, QueryError> {
    Ok(zero_width(text.lines().map(|l| l.split('\t').map(str::to_string).collect()).collect()))
}

/// Reads TSV output back into a table.
pub fn read_tsv_table(text: &str) -> Result<SolutionTable, QueryError> {
    let cells = read_tsv(text)?;
    let (head, body) = cells.split_first().ok_or_else(|| malformed(ResultFormat::Tsv, "missing header"))?;
    let header = head.iter().map(|h| Variable::new(h.strip_prefix('?').unwrap_or(h))).collect::<Result<Vec<_>, _>>()?;
    let rows = body
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| if c.is_empty() { Ok(None) } else { parse_term(c).map(Some) })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| malformed(ResultFormat::Tsv, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolutionTable { header, rows })
}

fn term_from_parts(kind: &str, value: &str, lang: Option<&str>, datatype: Option<&str>) -> Result<Term, String> {
    let term = match kind {
        "uri" => Term::Iri(Iri::new(value).map_err(|e| e.to_string())?),
        "bnode" => Term::Blank(BlankNode::new(value).map_err(|e| e.to_string())?),
        "literal" | "typed-literal" => match (lang, datatype) {
            (Some(lang), _) => Term::Literal(Literal::lang_tagged(value, lang).map_err(|e| e.to_string())?),
            (None, Some(dt)) => {
                let dt = Iri::new(dt).map_err(|e| e.to_string())?;
                Term::Literal(Literal::typed(value, dt).map_err(|e| e.to_string())?)
            }
            (None, None) => Term::Literal(Literal::simple(value)),
        },
        other => return Err(format!("unknown term type {other:?}")),
    };
    Ok(term)
}

/// Reads JSON results back into a table.
pub fn read_json(text: &str) -> Result<SolutionTable, QueryError> {
    let bad = |d: &str| malformed(ResultFormat::Json, d);
    let doc: Value = serde_json::from_str(text).map_err(|e| malformed(ResultFormat::Json, e))?;
    let header = doc["head"]["vars"]
        .as_array()
        .ok_or_else(|| bad("head.vars missing"))?
        .iter()
        .map(|v| v.as_str().ok_or_else(|| bad("variable is not a string")).and_then(Variable::new))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = SolutionTable::new(header);
    for b in doc["results"]["bindings"].as_array().ok_or_else(|| bad("results.bindings missing"))? {
        let obj = b.as_object().ok_or_else(|| bad("binding is not an object"))?;
        let mut row = vec![None; table.header.len()];
        for (name, value) in obj {
            let col = table.column(name).ok_or_else(|| bad("binding for undeclared variable"))?;
            let field = |k: &str| value.get(k).and_then(Value::as_str);
            let term = term_from_parts(
                field("type").unwrap_or_default(),
                field("value").ok_or_else(|| bad("binding without value"))?,
                field("xml:lang"),
                field("datatype"),
            )
            .map_err(|e| malformed(ResultFormat::Json, e))?;
            row[col] = Some(term);
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Reads XML results back into a table.
pub fn read_xml(text: &str) -> Result<SolutionTable, QueryError> {
    let err = |e: &dyn fmt::Display| malformed(ResultFormat::Xml, e);
    let mut reader = Reader::from_str(text);
    let mut table = SolutionTable::default();
    let mut row: Option<Vec<Option<Term>>> = None;
    let mut binding: Option<usize> = None;
    let mut term: Option<(String, Option<String>, Option<String>)> = None;
    let mut value = String::new();
    loop {
        let event = reader.read_event().map_err(|e| err(&e))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let attr = |name: &str| -> Result<Option<String>, QueryError> {
                    for a in e.attributes() {
                        let a = a.map_err(|x| err(&x))?;
                        if a.key.as_ref() == name {
                            return Ok(Some(unescape_attr(&a.value).map_err(|x| err(&x))?));
                        }
                    }
                    Ok(None)
                };
                match e.local_name().as_ref() {
                    "variable" => {
                        let name = attr("name")?.ok_or_else(|| err(&"variable without name"))?;
                        table.header.push(Variable::new(name)?);
                    }
                    "result" => {
                        row = Some(vec![None; table.header.len()]);
                        if matches!(event, Event::Empty(_)) {
                            table.rows.push(row.take().unwrap());
                        }
                    }
                    "binding" => {
                        let name = attr("name")?.ok_or_else(|| err(&"binding without name"))?;
                        binding = Some(table.column(&name).ok_or_else(|| err(&"binding for undeclared variable"))?);
                    }
                    kind @ ("uri" | "bnode" | "literal") => {
                        let kind = kind.to_string();
                        term = Some((kind, attr("xml:lang")?, attr("datatype")?));
                        value.clear();
                        if matches!(event, Event::Empty(_)) {
                            finish_term(&mut term, &value, binding, &mut row).map_err(|e| err(&e))?;
                        }
                    }
                    _ => {}
                }
            }
            Event::Text(t) if term.is_some() => value.push_str(&t.xml10_content()),
            Event::CData(t) if term.is_some() => value.push_str(&t.xml10_content()),
            Event::GeneralRef(r) if term.is_some() => {
                let resolved = if r.is_char_ref() {
                    r.resolve_char_ref().ok().flatten()
                } else {
                    match r.xml10_content().as_ref() {
                        "lt" => Some('<'),
                        "gt" => Some('>'),
                        "amp" => Some('&'),
                        "quot" => Some('"'),
                        "apos" => Some('\''),
                        _ => None,
                    }
                };
                value.push(resolved.ok_or_else(|| err(&"unknown entity reference"))?);
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                "uri" | "bnode" | "literal" => {
                    finish_term(&mut term, &value, binding, &mut row).map_err(|e| err(&e))?
                }
                "binding" => binding = None,
                "result" => table.rows.push(row.take().ok_or_else(|| err(&"unbalanced result"))?),
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(table)
}

fn finish_term(
    term: &mut Option<(String, Option<String>, Option<String>)>,
    value: &str,
    binding: Option<usize>,
    row: &mut Option<Vec<Option<Term>>>,
) -> Result<(), String> {
    let (kind, lang, datatype) = term.take().ok_or("value outside a binding")?;
    let parsed = term_from_parts(&kind, value, lang.as_deref(), datatype.as_deref())?;
    let (Some(col), Some(row)) = (binding, row.as_mut()) else {
        return Err("term outside a result binding".into());
    };
    row[col] = Some(parsed);
    Ok(())
}

fn unescape_attr(raw: &str) -> Result<String, quick_xml::escape::EscapeError> {
    quick_xml::escape::unescape(raw).map(|c| c.into_owned())
}
