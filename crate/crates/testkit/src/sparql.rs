//! Evaluates the handful of SPARQL shapes the client emits over a fixed
//! triple list: one triple pattern or a UNION of them, under ASK or
//! SELECT with an optional LIMIT. Literals match by lexical form.

use std::collections::BTreeMap;

use kgvalid_core::rdf::{Term, Triple};
use serde_json::{json, Value};

use crate::server::{Handler, RecordedRequest, StubResponse};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Iri(String),
    Literal(String),
    Var(String),
    Word(String),
}

fn tokenize(q: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = q.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() || c == '.' => i += 1,
            '{' => {
                out.push(Token::Open);
                i += 1;
            }
            '}' => {
                out.push(Token::Close);
                i += 1;
            }
            '<' => {
                let end = chars[i..].iter().position(|&c| c == '>').ok_or("unterminated IRI")? + i;
                out.push(Token::Iri(chars[i + 1..end].iter().collect()));
                i = end + 1;
            }
            '"' => {
                let mut lex = String::new();
                i += 1;
                loop {
                    let c = *chars.get(i).ok_or("unterminated literal")?;
                    i += 1;
                    match c {
                        '"' => break,
                        '\\' => {
                            let e = *chars.get(i).ok_or("dangling escape")?;
                            i += 1;
                            match e {
                                'n' => lex.push('\n'),
                                'r' => lex.push('\r'),
                                't' => lex.push('\t'),
                                'u' => {
                                    let hex: String = chars.get(i..i + 4).ok_or("short \\u escape")?.iter().collect();
                                    let cp = u32::from_str_radix(&hex, 16).map_err(|e| e.to_string())?;
                                    lex.push(char::from_u32(cp).ok_or("bad code point")?);
                                    i += 4;
                                }
                                other => lex.push(other),
                            }
                        }
                        other => lex.push(other),
                    }
                }
                // datatype or language suffixes are ignored for matching
                if chars.get(i) == Some(&'@') {
                    while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '}' {
                        i += 1;
                    }
                } else if chars.get(i) == Some(&'^') {
                    let end = chars[i..].iter().position(|&c| c == '>').ok_or("unterminated datatype")? + i;
                    i = end + 1;
                }
                out.push(Token::Literal(lex));
            }
            '?' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Var(chars[start..i].iter().collect()));
            }
            c if c.is_alphanumeric() => {
                let start = i;
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
                out.push(Token::Word(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum PatternTerm {
    Iri(String),
    Literal(String),
    Var(String),
}

type Pattern = [PatternTerm; 3];

#[derive(Debug)]
pub struct Query {
    ask: bool,
    vars: Vec<String>,
    union: Vec<Pattern>,
    limit: Option<usize>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expect(&mut self, t: Token) -> Result<(), String> {
        match self.next() {
            Some(got) if got == t => Ok(()),
            got => Err(format!("expected {t:?}, got {got:?}")),
        }
    }

    fn word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Token::Word(x)) if x.eq_ignore_ascii_case(w)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<PatternTerm, String> {
        match self.next() {
            Some(Token::Iri(i)) => Ok(PatternTerm::Iri(i)),
            Some(Token::Literal(l)) => Ok(PatternTerm::Literal(l)),
            Some(Token::Var(v)) => Ok(PatternTerm::Var(v)),
            other => Err(format!("expected a term, got {other:?}")),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, String> {
        Ok([self.term()?, self.term()?, self.term()?])
    }

    fn group(&mut self) -> Result<Vec<Pattern>, String> {
        self.expect(Token::Open)?;
        let mut union = Vec::new();
        if self.peek() == Some(&Token::Open) {
            loop {
                self.expect(Token::Open)?;
                union.push(self.pattern()?);
                self.expect(Token::Close)?;
                if !self.word("UNION") {
                    break;
                }
            }
        } else {
            union.push(self.pattern()?);
        }
        self.expect(Token::Close)?;
        Ok(union)
    }
}

pub fn parse_query(q: &str) -> Result<Query, String> {
    let mut p = Parser { tokens: tokenize(q)?, pos: 0 };
    let query = if p.word("ASK") {
        Query { ask: true, vars: Vec::new(), union: p.group()?, limit: None }
    } else if p.word("SELECT") {
        let mut vars = Vec::new();
        while let Some(Token::Var(v)) = p.peek().cloned() {
            p.pos += 1;
            vars.push(v);
        }
        if !p.word("WHERE") {
            return Err("expected WHERE".into());
        }
        let union = p.group()?;
        let limit = if p.word("LIMIT") {
            match p.next() {
                Some(Token::Word(n)) => Some(n.parse().map_err(|_| "bad LIMIT")?),
                other => return Err(format!("bad LIMIT {other:?}")),
            }
        } else {
            None
        };
        Query { ask: false, vars, union, limit }
    } else {
        return Err("expected ASK or SELECT".into());
    };
    if p.pos != p.tokens.len() {
        return Err("trailing tokens".into());
    }
    Ok(query)
}

fn match_pattern(pattern: &Pattern, t: &Triple) -> Option<BTreeMap<String, Term>> {
    let mut binding = BTreeMap::new();
    for (pt, term) in pattern.iter().zip([t.subject(), t.predicate(), t.object()]) {
        match pt {
            PatternTerm::Iri(i) => {
                if term.as_iri().map(|x| x.as_str()) != Some(i.as_str()) {
                    return None;
                }
            }
            PatternTerm::Literal(l) => {
                if term.as_literal().map(|x| x.lexical()) != Some(l.as_str()) {
                    return None;
                }
            }
            PatternTerm::Var(v) => match binding.get(v) {
                Some(bound) if bound != term => return None,
                Some(_) => {}
                None => {
                    binding.insert(v.clone(), term.clone());
                }
            },
        }
    }
    Some(binding)
}

pub fn json_term(t: &Term) -> Value {
    match t {
        Term::Iri { value } => json!({"type": "uri", "value": value.as_str()}),
        Term::Literal(lit) => {
            let mut v = json!({"type": "literal", "value": lit.lexical()});
            if let Some(dt) = lit.datatype() {
                v["datatype"] = json!(dt.as_str());
            }
            if let Some(lang) = lit.language() {
                v["xml:lang"] = json!(lang);
            }
            v
        }
        Term::Blank { label } => json!({"type": "bnode", "value": label}),
    }
}

/// Evaluates `q` over `triples`, producing a SPARQL JSON results document.
pub fn evaluate(q: &str, triples: &[Triple]) -> Result<Value, String> {
    let query = parse_query(q)?;
    let mut rows = Vec::new();
    for pattern in &query.union {
        for t in triples {
            if let Some(b) = match_pattern(pattern, t) {
                rows.push(b);
                if query.ask {
                    return Ok(json!({"head": {}, "boolean": true}));
                }
            }
        }
    }
    if query.ask {
        return Ok(json!({"head": {}, "boolean": false}));
    }
    if let Some(limit) = query.limit {
        rows.truncate(limit);
    }
    let bindings: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for var in &query.vars {
                if let Some(t) = row.get(var) {
                    obj.insert(var.clone(), json_term(t));
                }
            }
            Value::Object(obj)
        })
        .collect();
    Ok(json!({"head": {"vars": query.vars}, "results": {"bindings": bindings}}))
}

/// Extracts the `query` parameter from a form body or the URL query string.
pub fn query_text(req: &RecordedRequest) -> Option<String> {
    let from_pairs =
        |s: &str| url::form_urlencoded::parse(s.as_bytes()).find(|(k, _)| k == "query").map(|(_, v)| v.into_owned());
    from_pairs(&req.body).or_else(|| req.url.split_once('?').and_then(|(_, q)| from_pairs(q)))
}

/// A SPARQL endpoint over `triples`. Unsupported queries get HTTP 400.
pub fn sparql_handler(triples: Vec<Triple>) -> impl Handler {
    move |req: &RecordedRequest| match query_text(req) {
        None => StubResponse::status(400, "missing query"),
        Some(q) => match evaluate(&q, &triples) {
            Ok(v) => StubResponse {
                status: 200,
                body: v.to_string(),
                content_type: "application/sparql-results+json".to_owned(),
            },
            Err(e) => StubResponse::status(400, e),
        },
    }
}
