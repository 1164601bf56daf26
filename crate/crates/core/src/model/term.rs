use std::fmt;

use chrono::NaiveDate;

use super::{vocab, ModelError};

/// An absolute IRI.
///
/// Validation is lexical only: a scheme followed by `:`, no whitespace and no
/// angle brackets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(text: impl Into<String>) -> Result<Self, ModelError> {
        let text = text.into();
        match iri_problem(&text) {
            None => Ok(Iri(text)),
            Some(reason) => Err(ModelError::MalformedIri { text, reason }),
        }
    }

    /// Builds an IRI from text already known to be valid (vocabulary constants).
    pub(crate) fn new_unchecked(text: impl Into<String>) -> Self {
        let text = text.into();
        debug_assert!(iri_problem(&text).is_none(), "invalid IRI constant {text}");
        Iri(text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// The IRI with any `#fragment` removed.
    pub fn without_fragment(&self) -> &str {
        match self.0.find('#') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }

    /// Text after the last `#`, or after the last `/` when there is no fragment.
    /// Falls back to the whole IRI when that suffix is empty.
    pub fn local_name(&self) -> &str {
        let cut = self.0.rfind('#').or_else(|| self.0.rfind('/'));
        match cut {
            Some(i) if i + 1 < self.0.len() => &self.0[i + 1..],
            _ => &self.0,
        }
    }

    pub fn scheme(&self) -> &str {
        &self.0[..self.0.find(':').unwrap_or(0)]
    }
}

fn iri_problem(text: &str) -> Option<&'static str> {
    if text.is_empty() {
        return Some("empty IRI");
    }
    if text.chars().any(char::is_whitespace) {
        return Some("whitespace is not allowed");
    }
    if text.contains(['<', '>', '"']) {
        return Some("angle brackets and quotes are not allowed");
    }
    let Some(colon) = text.find(':') else {
        return Some("missing scheme");
    };
    let scheme = &text[..colon];
    let mut chars = scheme.chars();
    let starts_alpha = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    if !starts_alpha || !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return Some("missing scheme");
    }
    None
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Replaces (or adds) the fragment of `base` with `fragment_id`, as `rdf:ID` does.
pub fn resolve_id(base: &Iri, fragment_id: &str) -> Result<Iri, ModelError> {
    if !is_xml_name(fragment_id) {
        return Err(ModelError::MalformedIri {
            text: format!("{}#{}", base.without_fragment(), fragment_id),
            reason: "fragment identifier is not an XML name",
        });
    }
    Iri::new(format!("{}#{}", base.without_fragment(), fragment_id))
}

/// True for a non-colonised XML name (`NCName`), ASCII plus any non-ASCII letters.
pub fn is_xml_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{B7}'))
}

/// A blank node label, unique within one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, ModelError> {
        let label = label.into();
        if !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(BlankNode(label))
        } else {
            Err(ModelError::MalformedBlankNode(label))
        }
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Option<Iri>,
    lang: Option<String>,
}

impl Literal {
    /// A plain literal with neither datatype nor language tag.
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, lang: None }
    }

    /// A typed literal. Values typed `xsd:date` must have the `YYYY-MM-DD` form.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, ModelError> {
        let lexical = lexical.into();
        if datatype.as_str() == vocab::XSD_DATE && parse_date(&lexical).is_none() {
            return Err(ModelError::InvalidDate(lexical));
        }
        Ok(Literal { lexical, datatype: Some(datatype), lang: None })
    }

    pub fn lang_tagged(lexical: impl Into<String>, lang: impl Into<String>) -> Result<Self, ModelError> {
        let lang = lang.into();
        let valid =
            !lang.is_empty() && lang.split('-').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()));
        if !valid {
            return Err(ModelError::MalformedLanguageTag(lang));
        }
        Ok(Literal { lexical: lexical.into(), datatype: None, lang: Some(lang) })
    }

    pub fn date(value: NaiveDate) -> Self {
        Literal {
            lexical: value.format("%Y-%m-%d").to_string(),
            datatype: Some(Iri::new_unchecked(vocab::XSD_DATE)),
            lang: None,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    /// Plain or explicitly `xsd:string` typed.
    pub fn is_string(&self) -> bool {
        self.lang.is_none() && self.datatype.as_ref().is_none_or(|d| d.as_str() == vocab::XSD_STRING)
    }

    /// Equality used by query matching: plain and `xsd:string` literals with
    /// the same lexical form are the same value.
    pub fn query_eq(&self, other: &Literal) -> bool {
        if self.lexical != other.lexical {
            return false;
        }
        (self.is_string() && other.is_string()) || self == other
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.lexical.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                '\u{8}' => f.write_str("\\b")?,
                '\u{c}' => f.write_str("\\f")?,
                c if (c as u32) < 0x20 || c as u32 == 0x7f => write!(f, "\\u{:04X}", c as u32)?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")?;
        if let Some(lang) = &self.lang {
            write!(f, "@{lang}")?;
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^{dt}")?;
        }
        Ok(())
    }
}

/// Parses a strict `YYYY-MM-DD` calendar date.
pub fn parse_date(text: &str) -> Option<NaiveDate> {
    let b = text.as_bytes();
    let shaped = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    if !shaped {
        return None;
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()
}

/// Subject position of a triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(i) => Some(i),
            Subject::Blank(_) => None,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(i) => i.fmt(f),
            Subject::Blank(b) => b.fmt(f),
        }
    }
}

impl From<Iri> for Subject {
    fn from(i: Iri) -> Self {
        Subject::Iri(i)
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::Blank(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// The term as a subject, unless it is a literal.
    pub fn to_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(i) => Some(Subject::Iri(i.clone())),
            Term::Blank(b) => Some(Subject::Blank(b.clone())),
            Term::Literal(_) => None,
        }
    }

    pub fn query_eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Literal(a), Term::Literal(b)) => a.query_eq(b),
            _ => self == other,
        }
    }

    pub fn subject_eq(&self, subject: &Subject) -> bool {
        match (self, subject) {
            (Term::Iri(a), Subject::Iri(b)) => a == b,
            (Term::Blank(a), Subject::Blank(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::Blank(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => Term::Iri(i),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

/// A subject-predicate-object statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject: subject.into(), predicate, object: object.into() }
    }
}

impl fmt::Display for Triple {
    /// N-Triples line, without the trailing newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
