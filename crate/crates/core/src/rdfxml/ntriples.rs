use crate::model::{BlankNode, Graph, Iri, Literal, Term, Triple};

/// One `subject predicate object .` line per triple, in graph order.
pub fn serialize_ntriples(g: &Graph) -> String {
    let mut out = String::new();
    for t in g.iter() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

/// Parses a single N-Triples term, e.g. `<http://x>`, `_:b0` or `"v"@en`.
pub fn parse_term(text: &str) -> Result<Term, String> {
    let mut cursor = Cursor { s: text, pos: 0 };
    let term = cursor.term()?;
    if cursor.pos != text.len() {
        return Err(format!("trailing input after term in {text:?}"));
    }
    Ok(term)
}

/// Parses an N-Triples document. Blank lines and `#` comments are skipped.
pub fn parse_ntriples(text: &str) -> Result<Graph, String> {
    let mut g = Graph::new();
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut c = Cursor { s: trimmed, pos: 0 };
        let parse = |c: &mut Cursor| -> Result<Triple, String> {
            let s = c.term()?.to_subject().ok_or("literal in subject position")?;
            c.skip_ws();
            let p = match c.term()? {
                Term::Iri(i) => i,
                _ => return Err("predicate must be an IRI".into()),
            };
            c.skip_ws();
            let o = c.term()?;
            c.skip_ws();
            if c.rest() != "." {
                return Err("expected ' .' at end of line".into());
            }
            Ok(Triple::new(s, p, o))
        };
        let t = parse(&mut c).map_err(|e| format!("line {}: {e}", n + 1))?;
        g.insert(t);
    }
    Ok(g)
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start_matches([' ', '\t']);
        self.pos = self.s.len() - trimmed.len();
    }

    fn term(&mut self) -> Result<Term, String> {
        let rest = self.rest();
        if let Some(r) = rest.strip_prefix('<') {
            let end = r.find('>').ok_or("unterminated IRI")?;
            self.pos += end + 2;
            return Iri::new(&r[..end]).map(Term::Iri).map_err(|e| e.to_string());
        }
        if let Some(r) = rest.strip_prefix("_:") {
            let end = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(r.len());
            self.pos += end + 2;
            return BlankNode::new(&r[..end]).map(Term::Blank).map_err(|e| e.to_string());
        }
        if rest.starts_with('"') {
            return self.literal().map(Term::Literal);
        }
        Err(format!("expected a term at {:?}", rest.chars().take(20).collect::<String>()))
    }

    fn literal(&mut self) -> Result<Literal, String> {
        let mut lexical = String::new();
        let mut chars = self.rest()[1..].char_indices();
        let close = loop {
            let (i, c) = chars.next().ok_or("unterminated literal")?;
            match c {
                '"' => break i,
                '\\' => {
                    let (_, e) = chars.next().ok_or("dangling escape")?;
                    match e {
                        't' => lexical.push('\t'),
                        'b' => lexical.push('\u{8}'),
                        'n' => lexical.push('\n'),
                        'r' => lexical.push('\r'),
                        'f' => lexical.push('\u{c}'),
                        '"' => lexical.push('"'),
                        '\'' => lexical.push('\''),
                        '\\' => lexical.push('\\'),
                        'u' | 'U' => {
                            let len = if e == 'u' { 4 } else { 8 };
                            let hex: String = (0..len).filter_map(|_| chars.next().map(|(_, h)| h)).collect();
                            let code = u32::from_str_radix(&hex, 16).map_err(|_| "bad unicode escape")?;
                            lexical.push(char::from_u32(code).ok_or("bad unicode escape")?);
                        }
                        other => return Err(format!("unknown escape \\{other}")),
                    }
                }
                c => lexical.push(c),
            }
        };
        self.pos += close + 2;
        let rest = self.rest();
        if let Some(r) = rest.strip_prefix('@') {
            let end = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '-')).unwrap_or(r.len());
            self.pos += end + 1;
            return Literal::lang_tagged(lexical, &r[..end]).map_err(|e| e.to_string());
        }
        if rest.starts_with("^^") {
            self.pos += 2;
            return match self.term()? {
                Term::Iri(dt) => Literal::typed(lexical, dt).map_err(|e| e.to_string()),
                _ => Err("datatype must be an IRI".into()),
            };
        }
        Ok(Literal::simple(lexical))
    }
}
