use crate::model::{rdf_type, BlankNode, Iri, Literal, PrefixMap, Term};
use crate::rdfxml::parse_term;

use super::ast::{PatternGroup, Projection, QueryAst, TermPattern, TriplePattern, Variable};
use super::QueryError;

const UNSUPPORTED: &[&str] = &[
    "ASK",
    "BIND",
    "CONSTRUCT",
    "DESCRIBE",
    "DISTINCT",
    "FILTER",
    "FROM",
    "GRAPH",
    "GROUP",
    "HAVING",
    "LIMIT",
    "MINUS",
    "OFFSET",
    "OPTIONAL",
    "ORDER",
    "REDUCED",
    "SERVICE",
    "VALUES",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Iri(String),
    PName(String),
    Blank(String),
    Literal { lexical: String, suffix: Suffix },
    Punct(char),
}

#[derive(Debug, Clone, PartialEq)]
enum Suffix {
    None,
    Lang(String),
    Datatype(String),
    PrefixedDatatype(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

/// Parses query text into a tree. Groups holding a single member collapse to
/// that member, so `{ { A } UNION { B } }` is just the union.
pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { text, tokens, pos: 0, prefixes: PrefixMap::new() };
    p.query()
}

fn syntax(text: &str, offset: usize, expected: impl Into<String>) -> QueryError {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    QueryError::QuerySyntax { offset, line, column, expected: expected.into() }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, QueryError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' | b'}' | b'.' | b';' | b',' | b'*' | b'(' | b')' => {
                out.push(Spanned { tok: Tok::Punct(c as char), offset: start });
                i += 1;
            }
            b'?' | b'$' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &text[start + 1..i];
                Variable::new(name).map_err(|_| syntax(text, start, "a variable name"))?;
                out.push(Spanned { tok: Tok::Var(name.to_string()), offset: start });
            }
            b'<' => {
                let end = text[i..].find('>').ok_or_else(|| syntax(text, start, "'>' closing the IRI"))?;
                out.push(Spanned { tok: Tok::Iri(text[i + 1..i + end].to_string()), offset: start });
                i += end + 1;
            }
            b'"' | b'\'' => {
                let (tok, len) = literal(text, i)?;
                out.push(Spanned { tok, offset: start });
                i += len;
            }
            b'_' if bytes.get(i + 1) == Some(&b':') => {
                i += 2;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Spanned { tok: Tok::Blank(text[start + 2..i].to_string()), offset: start });
            }
            _ if c.is_ascii_alphabetic() || c == b'_' || c == b':' => {
                while i < bytes.len() && is_name_byte(bytes[i]) {
                    i += 1;
                }
                // A local name may contain dots but never ends with one.
                while text[start..i].contains(':') && text[start..i].ends_with('.') {
                    i -= 1;
                }
                let word = &text[start..i];
                let tok = if word.contains(':') { Tok::PName(word.to_string()) } else { Tok::Word(word.to_string()) };
                out.push(Spanned { tok, offset: start });
            }
            _ => {
                return Err(syntax(
                    text,
                    start,
                    format!("a query token, found {:?}", text[i..].chars().next().unwrap()),
                ))
            }
        }
    }
    Ok(out)
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b':' | b'.') || b >= 0x80
}

/// Reads a quoted literal at `start` with its optional `@lang` or `^^type`
/// suffix. Returns the token and its length in bytes.
fn literal(text: &str, start: usize) -> Result<(Tok, usize), QueryError> {
    let quote = text.as_bytes()[start] as char;
    let mut end = None;
    let mut escaped = false;
    for (i, c) in text[start + 1..].char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' => escaped = true,
            c if c == quote => {
                end = Some(start + 1 + i);
                break;
            }
            '\n' => break,
            _ => {}
        }
    }
    let end = end.ok_or_else(|| syntax(text, start, "closing quote of the literal"))?;
    let body = &text[start + 1..end];
    let normalized = if quote == '\'' { body.replace("\\'", "'").replace('"', "\\\"") } else { body.to_string() };
    let lexical = match parse_term(&format!("\"{normalized}\"")) {
        Ok(Term::Literal(l)) => l.lexical().to_string(),
        Ok(_) => unreachable!("quoted text parses as a literal"),
        Err(e) => return Err(syntax(text, start, format!("a valid literal ({e})"))),
    };
    let mut len = end + 1 - start;
    let rest = &text[end + 1..];
    let suffix = if let Some(r) = rest.strip_prefix('@') {
        let n = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '-')).unwrap_or(r.len());
        len += n + 1;
        Suffix::Lang(r[..n].to_string())
    } else if let Some(r) = rest.strip_prefix("^^<") {
        let n = r.find('>').ok_or_else(|| syntax(text, end + 1, "'>' closing the datatype IRI"))?;
        len += n + 4;
        Suffix::Datatype(r[..n].to_string())
    } else if let Some(r) = rest.strip_prefix("^^") {
        let n = r.bytes().position(|b| !is_name_byte(b)).unwrap_or(r.len());
        let name = r[..n].trim_end_matches('.');
        if !name.contains(':') {
            return Err(syntax(text, end + 1, "a datatype IRI or prefixed name after '^^'"));
        }
        len += name.len() + 2;
        Suffix::PrefixedDatatype(name.to_string())
    } else {
        Suffix::None
    };
    Ok((Tok::Literal { lexical, suffix }, len))
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Spanned>,
    pos: usize,
    prefixes: PrefixMap,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.text.len(), |s| s.offset)
    }

    fn error(&self, expected: &str) -> QueryError {
        match self.peek() {
            Some(Tok::Word(w)) if UNSUPPORTED.contains(&w.to_ascii_uppercase().as_str()) => {
                let s = syntax(self.text, self.offset(), "");
                let QueryError::QuerySyntax { line, column, .. } = s else { unreachable!() };
                QueryError::UnsupportedKeyword { keyword: w.to_ascii_uppercase(), line, column }
            }
            Some(_) => syntax(self.text, self.offset(), expected),
            None => syntax(self.text, self.offset(), format!("{expected} before end of query")),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Punct(c))
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        if self.at_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    fn query(&mut self) -> Result<QueryAst, QueryError> {
        while self.at_keyword("PREFIX") {
            self.pos += 1;
            let name = match self.next() {
                Some(Tok::PName(p)) if p.ends_with(':') && p.matches(':').count() == 1 => {
                    p.trim_end_matches(':').to_string()
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.error("a prefix name ending in ':'"));
                }
            };
            let ns = match self.next() {
                Some(Tok::Iri(i)) => i,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("a namespace IRI in angle brackets"));
                }
            };
            let ns = Iri::new(ns)
                .map_err(|e| syntax(self.text, self.tokens[self.pos - 1].offset, format!("a valid IRI ({e})")))?;
            self.prefixes.insert(name, ns);
        }
        if !self.at_keyword("SELECT") {
            return Err(self.error("SELECT"));
        }
        self.pos += 1;
        let projection = if self.at_punct('*') {
            self.pos += 1;
            Projection::All
        } else {
            let mut vars = Vec::new();
            while let Some(Tok::Var(v)) = self.peek() {
                vars.push(Variable::new(v.clone())?);
                self.pos += 1;
            }
            if vars.is_empty() {
                return Err(self.error("'*' or at least one variable"));
            }
            Projection::Vars(vars)
        };
        if self.at_keyword("WHERE") {
            self.pos += 1;
        }
        let where_clause = self.group()?;
        if self.peek().is_some() {
            return Err(self.error("end of query"));
        }
        Ok(QueryAst { prefixes: std::mem::take(&mut self.prefixes), projection, where_clause })
    }

    /// `{ ... }` with its members; a lone member is returned unwrapped.
    fn group(&mut self) -> Result<PatternGroup, QueryError> {
        self.expect_punct('{')?;
        let mut items: Vec<PatternGroup> = Vec::new();
        let mut bgp: Vec<TriplePattern> = Vec::new();
        loop {
            if self.at_punct('}') {
                self.pos += 1;
                break;
            }
            if self.at_punct('{') {
                if !bgp.is_empty() {
                    items.push(PatternGroup::Bgp(std::mem::take(&mut bgp)));
                }
                let mut g = self.group()?;
                while self.at_keyword("UNION") {
                    self.pos += 1;
                    g = PatternGroup::union(g, self.group()?);
                }
                items.push(g);
                if self.at_punct('.') {
                    self.pos += 1;
                }
                continue;
            }
            self.triples(&mut bgp)?;
            if self.at_punct('.') {
                self.pos += 1;
            } else if !self.at_punct('}') && !self.at_punct('{') {
                return Err(self.error("'.' or '}' after a triple pattern"));
            }
        }
        if !bgp.is_empty() || items.is_empty() {
            items.push(PatternGroup::Bgp(bgp));
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { PatternGroup::Group(items) })
    }

    /// One subject with its `;`-separated predicates and `,`-separated objects.
    fn triples(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.term("a subject")?;
        if matches!(subject, TermPattern::Term(Term::Literal(_))) {
            self.pos -= 1;
            return Err(self.error("a variable, IRI or blank node as subject"));
        }
        loop {
            let predicate = if self.at_keyword("a") {
                self.pos += 1;
                TermPattern::Term(Term::Iri(rdf_type()))
            } else {
                let p = self.term("a predicate")?;
                if matches!(p, TermPattern::Term(ref t) if t.as_iri().is_none()) {
                    self.pos -= 1;
                    return Err(self.error("a variable or IRI as predicate"));
                }
                p
            };
            loop {
                let object = self.term("an object")?;
                out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
                if !self.at_punct(',') {
                    break;
                }
                self.pos += 1;
            }
            if !self.at_punct(';') {
                return Ok(());
            }
            self.pos += 1;
            if self.at_punct('.') || self.at_punct('}') {
                return Ok(());
            }
        }
    }

    fn term(&mut self, what: &str) -> Result<TermPattern, QueryError> {
        let offset = self.offset();
        let bad = |e: String| syntax(self.text, offset, format!("{what} ({e})"));
        let t = match self.peek().cloned() {
            Some(Tok::Var(v)) => TermPattern::Var(Variable::new(v)?),
            Some(Tok::Iri(i)) => TermPattern::Term(Term::Iri(Iri::new(i).map_err(|e| bad(e.to_string()))?)),
            Some(Tok::PName(p)) => TermPattern::Term(Term::Iri(self.expand(&p)?)),
            Some(Tok::Blank(b)) => TermPattern::Term(Term::Blank(BlankNode::new(b).map_err(|e| bad(e.to_string()))?)),
            Some(Tok::Literal { lexical, suffix }) => {
                let literal = match suffix {
                    Suffix::None => Ok(Literal::simple(lexical)),
                    Suffix::Lang(lang) => Literal::lang_tagged(lexical, lang),
                    Suffix::Datatype(dt) => Literal::typed(lexical, Iri::new(dt).map_err(|e| bad(e.to_string()))?),
                    Suffix::PrefixedDatatype(dt) => Literal::typed(lexical, self.expand(&dt)?),
                };
                TermPattern::Term(Term::Literal(literal.map_err(|e| bad(e.to_string()))?))
            }
            _ => return Err(self.error(what)),
        };
        self.pos += 1;
        Ok(t)
    }

    fn expand(&self, pname: &str) -> Result<Iri, QueryError> {
        let (prefix, _) = pname.split_once(':').expect("pname contains a colon");
        if self.prefixes.get(prefix).is_none() {
            return Err(QueryError::UnknownPrefix(prefix.to_string()));
        }
        self.prefixes
            .expand(pname)
            .ok_or_else(|| syntax(self.text, self.offset(), format!("a valid prefixed name, found {pname}")))
    }
}
