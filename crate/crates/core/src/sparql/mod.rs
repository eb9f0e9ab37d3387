//! The SPARQL subset used by CFQ-style queries and its grouped
//! intermediate representations.
//!
//! A query is a header (`SELECT count(*) WHERE`, `SELECT DISTINCT ?x0 WHERE`,
//! `ASK WHERE`, or none) followed by a brace-delimited body of `.`-separated
//! clauses. Each clause is either a triple of whitespace-free terms or a
//! `FILTER ( ... )` constraint, which is kept verbatim. Bodies without a
//! header and without braces are also accepted, e.g.
//! `M0 directed M2 . M1 directed M2`.

mod ir;

use std::collections::HashSet;
use std::fmt;

pub use ir::{ir_decode, ir_encode, parse_ir, serialize_ir, IrLevel, IrQuery, RelationGroup, SubjectGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SparqlError {
    #[error("query has an empty WHERE body")]
    EmptyBody,
    #[error("unsupported SPARQL construct {0:?}")]
    Unsupported(String),
    #[error("unexpected {found:?} at token {position}: expected {expected}")]
    Unexpected { position: usize, found: String, expected: &'static str },
    #[error("unexpected end of input: expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unbalanced brace at token {0}")]
    UnbalancedBrace(usize),
    #[error("relation {relation:?} at token {position} has no object")]
    DanglingRelation { position: usize, relation: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QueryForm {
    /// A bare clause list with no header or braces.
    Bare,
    Ask,
    SelectCount,
    Select { distinct: bool, vars: Vec<String> },
}

impl QueryForm {
    fn header(&self) -> Option<String> {
        match self {
            QueryForm::Bare => None,
            QueryForm::Ask => Some("ASK WHERE {".into()),
            QueryForm::SelectCount => Some("SELECT count(*) WHERE {".into()),
            QueryForm::Select { distinct, vars } => Some(format!(
                "SELECT {}{} WHERE {{",
                if *distinct { "DISTINCT " } else { "" },
                vars.join(" ")
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triple {
    pub fn new(subject: &str, relation: &str, object: &str) -> Self {
        Triple { subject: subject.into(), relation: relation.into(), object: object.into() }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.relation, self.object)
    }
}

/// A non-triple clause, kept as its token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint(pub Vec<String>);

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// A parsed query. Triples are unique and keep first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparqlQuery {
    pub form: QueryForm,
    triples: Vec<Triple>,
    pub constraints: Vec<Constraint>,
}

impl SparqlQuery {
    /// Builds a query, dropping repeated triples.
    pub fn new(form: QueryForm, triples: Vec<Triple>, constraints: Vec<Constraint>) -> Self {
        Self::with_duplicates(form, triples, constraints).0
    }

    fn with_duplicates(form: QueryForm, triples: Vec<Triple>, constraints: Vec<Constraint>) -> (Self, Vec<Triple>) {
        let mut seen = HashSet::new();
        let mut unique = Vec::with_capacity(triples.len());
        let mut dropped = Vec::new();
        for t in triples {
            if seen.insert(t.clone()) {
                unique.push(t);
            } else {
                dropped.push(t);
            }
        }
        (SparqlQuery { form, triples: unique, constraints }, dropped)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Same form, same constraint sequence and the same set of triples.
    pub fn clause_set_eq(&self, other: &SparqlQuery) -> bool {
        if self.form != other.form || self.constraints != other.constraints || self.triples.len() != other.triples.len()
        {
            return false;
        }
        let mine: HashSet<&Triple> = self.triples.iter().collect();
        other.triples.iter().all(|t| mine.contains(t))
    }

    /// Copy with triples sorted, for order-insensitive comparison.
    pub fn sorted(&self) -> SparqlQuery {
        let mut triples = self.triples.clone();
        triples.sort();
        SparqlQuery { form: self.form.clone(), triples, constraints: self.constraints.clone() }
    }
}

pub fn serialize_sparql(q: &SparqlQuery) -> String {
    q.to_string()
}

impl fmt::Display for SparqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clauses: Vec<String> = self
            .triples
            .iter()
            .map(Triple::to_string)
            .chain(self.constraints.iter().map(Constraint::to_string))
            .collect();
        let body = clauses.join(" . ");
        match self.form.header() {
            Some(h) => write!(f, "{h} {body} }}"),
            None => f.write_str(&body),
        }
    }
}

/// Splits text into tokens, detaching braces, commas and clause-final dots
/// from the terms they are glued to.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let mut word = raw;
        while word.len() > 1 && word.starts_with('{') {
            out.push("{".to_string());
            word = &word[1..];
        }
        let mut tail = Vec::new();
        while word.len() > 1 && word.ends_with(['}', ',', '.']) {
            tail.push(word[word.len() - 1..].to_string());
            word = &word[..word.len() - 1];
        }
        out.push(word.to_string());
        out.extend(tail.into_iter().rev());
    }
    out
}

const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "PREFIX", "BASE", "ORDER", "GROUP", "HAVING",
    "LIMIT", "OFFSET", "CONSTRUCT", "DESCRIBE", "FROM", ";",
];

pub(crate) fn is_delimiter(tok: &str) -> bool {
    matches!(tok, "{" | "}" | "." | ",")
}

pub(crate) struct Tokens {
    pub toks: Vec<String>,
    pub pos: usize,
}

impl Tokens {
    pub fn new(text: &str) -> Self {
        Tokens { toks: tokenize(text), pos: 0 }
    }

    pub fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    pub fn next(&mut self) -> Option<&str> {
        let t = self.toks.get(self.pos).map(String::as_str);
        self.pos += 1;
        t
    }

    pub fn unexpected(&self, expected: &'static str) -> SparqlError {
        match self.peek() {
            None => SparqlError::UnexpectedEnd(expected),
            Some(t) if UNSUPPORTED.contains(&t) => SparqlError::Unsupported(t.to_string()),
            Some(t) => SparqlError::Unexpected { position: self.pos, found: t.to_string(), expected },
        }
    }

    pub fn expect(&mut self, tok: &'static str) -> Result<(), SparqlError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(tok))
        }
    }

    /// A term in triple position.
    pub fn term(&mut self, expected: &'static str) -> Result<String, SparqlError> {
        match self.peek() {
            Some(t) if !is_delimiter(t) && !UNSUPPORTED.contains(&t) && !is_filter(t) => {
                let t = t.to_string();
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    /// Parses the query header, returning the form and whether a body brace
    /// was opened.
    pub fn header(&mut self) -> Result<(QueryForm, bool), SparqlError> {
        let form = match self.peek() {
            Some("ASK") => {
                self.pos += 1;
                QueryForm::Ask
            }
            Some("SELECT") => {
                self.pos += 1;
                match self.peek() {
                    Some("count(*)") => {
                        self.pos += 1;
                        QueryForm::SelectCount
                    }
                    _ => {
                        let distinct = self.peek() == Some("DISTINCT");
                        if distinct {
                            self.pos += 1;
                        }
                        let mut vars = Vec::new();
                        while let Some(v) = self.peek().filter(|t| t.starts_with('?')) {
                            vars.push(v.to_string());
                            self.pos += 1;
                        }
                        if vars.is_empty() {
                            return Err(self.unexpected("a projected variable"));
                        }
                        QueryForm::Select { distinct, vars }
                    }
                }
            }
            Some(t) if UNSUPPORTED.contains(&t) => return Err(SparqlError::Unsupported(t.to_string())),
            _ => return Ok((QueryForm::Bare, false)),
        };
        if self.peek() == Some("WHERE") {
            self.pos += 1;
        }
        self.expect("{")?;
        Ok((form, true))
    }

    /// Reads a `FILTER` constraint through its closing parenthesis.
    pub fn constraint(&mut self) -> Result<Constraint, SparqlError> {
        let start = self.pos;
        let mut depth: i64 = 0;
        let mut opened = false;
        loop {
            let Some(t) = self.next() else {
                return Err(SparqlError::UnexpectedEnd("')' closing FILTER"));
            };
            for c in t.chars() {
                match c {
                    '(' => {
                        depth += 1;
                        opened = true;
                    }
                    ')' => depth -= 1,
                    _ => {}
                }
            }
            if opened && depth <= 0 {
                break;
            }
        }
        Ok(Constraint(self.toks[start..self.pos].to_vec()))
    }
}

pub(crate) fn is_filter(tok: &str) -> bool {
    tok == "FILTER" || tok.starts_with("FILTER(")
}

/// Parses a query, also returning one warning per dropped duplicate triple.
pub fn parse_sparql_with_warnings(text: &str) -> Result<(SparqlQuery, Vec<String>), SparqlError> {
    let mut toks = Tokens::new(text);
    let (form, braced) = toks.header()?;
    let mut triples = Vec::new();
    let mut constraints = Vec::new();
    loop {
        match toks.peek() {
            None if braced => return Err(SparqlError::UnbalancedBrace(toks.pos)),
            None => break,
            Some("}") if braced => {
                toks.pos += 1;
                break;
            }
            Some("{") | Some("}") => return Err(SparqlError::Unsupported("nested group".into())),
            Some(t) if is_filter(t) => constraints.push(toks.constraint()?),
            Some(_) => {
                let s = toks.term("a subject")?;
                if toks.peek() == Some("{") {
                    return Err(SparqlError::Unsupported("nested group".into()));
                }
                let r = toks.term("a relation")?;
                let o = toks.term("an object")?;
                triples.push(Triple { subject: s, relation: r, object: o });
            }
        }
        match toks.peek() {
            Some(".") => toks.pos += 1,
            Some("}") if braced => {}
            None if braced => return Err(SparqlError::UnbalancedBrace(toks.pos)),
            None => {}
            Some("{") => return Err(SparqlError::Unsupported("nested group".into())),
            _ => return Err(toks.unexpected("'.' between clauses")),
        }
    }
    if toks.peek().is_some() {
        return Err(toks.unexpected("end of query"));
    }
    if triples.is_empty() && constraints.is_empty() {
        return Err(SparqlError::EmptyBody);
    }
    let (query, dropped) = SparqlQuery::with_duplicates(form, triples, constraints);
    let warnings = dropped.iter().map(|t| format!("dropped duplicate triple `{t}`")).collect();
    Ok((query, warnings))
}

/// Parses a query from the supported subset. Duplicate triples are dropped
/// with a logged warning.
pub fn parse_sparql(text: &str) -> Result<SparqlQuery, SparqlError> {
    let (q, warnings) = parse_sparql_with_warnings(text)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(q)
}
