//! Line-oriented N-Triples reader that also accepts prefixed names.
//!
//! LLM responses mix prose, code fences and statements, so a document is
//! never rejected: each line is either a triple, an ignorable line (blank,
//! comment, prefix directive) or a `skipped` diagnostic.

use serde::Serialize;

use super::prefix::{is_prefix_label, PrefixMap, RDF_TYPE, XSD};
use super::term::{is_blank_label, is_language_tag, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// The line produced no triple.
    Skipped,
    /// The line produced a triple that downstream stages may reject.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub triples: Vec<Triple>,
    /// 1-based source line of each entry in `triples`.
    pub triple_lines: Vec<usize>,
    pub diagnostics: Vec<Diagnostic>,
    /// Blank lines, comments and prefix directives.
    pub ignored_lines: usize,
}

impl ParseReport {
    pub fn skipped(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Skipped)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Term(Term),
    Dot,
}

enum LineOutcome {
    Ignored,
    Directive(String, String),
    Statement(Triple),
}

/// Parses every line of `text` independently. Prefix directives
/// (`@prefix p: <ns> .` or `PREFIX p: <ns>`) extend `prefixes` for the
/// lines that follow them.
pub fn parse_triples(text: &str, prefixes: &PrefixMap) -> ParseReport {
    let mut report = ParseReport::default();
    let mut local = prefixes.clone();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        match parse_line(raw, &local) {
            Ok(LineOutcome::Ignored) => report.ignored_lines += 1,
            Ok(LineOutcome::Directive(label, ns)) => {
                report.ignored_lines += 1;
                if let Err(e) = local.insert(&label, &ns) {
                    report.diagnostics.push(Diagnostic {
                        line: line_no,
                        severity: Severity::Warning,
                        message: format!("prefix directive ignored: {e}"),
                    });
                }
            }
            Ok(LineOutcome::Statement(triple)) => {
                if triple.subject().is_blank() {
                    report.diagnostics.push(Diagnostic {
                        line: line_no,
                        severity: Severity::Warning,
                        message: "blank-node subject; the fact has no entity anchor".to_owned(),
                    });
                }
                report.triples.push(triple);
                report.triple_lines.push(line_no);
            }
            Err(message) => report.diagnostics.push(Diagnostic { line: line_no, severity: Severity::Skipped, message }),
        }
    }
    report
}

fn parse_line(raw: &str, prefixes: &PrefixMap) -> Result<LineOutcome, String> {
    let line = raw.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(LineOutcome::Ignored);
    }
    if let Some(directive) = parse_directive(line) {
        return directive.map(|(l, ns)| LineOutcome::Directive(l, ns));
    }
    let tokens = tokenize(line, prefixes)?;
    let mut terms: Vec<Term> = Vec::with_capacity(3);
    let mut iter = tokens.into_iter();
    for tok in iter.by_ref() {
        match tok {
            Token::Term(t) => {
                terms.push(t);
                if terms.len() == 3 {
                    break;
                }
            }
            Token::Dot => return Err("statement ends before three terms".to_owned()),
        }
    }
    if terms.len() < 3 {
        return Err(format!("expected 3 terms, found {}", terms.len()));
    }
    match iter.next() {
        None | Some(Token::Dot) => {}
        Some(Token::Term(_)) => return Err("more than three terms on one line".to_owned()),
    }
    if iter.next().is_some() {
        return Err("unexpected content after statement terminator".to_owned());
    }
    let object = terms.pop().expect("three terms");
    let predicate = terms.pop().expect("three terms");
    let subject = terms.pop().expect("three terms");
    Triple::new(subject, predicate, object).map(LineOutcome::Statement).map_err(|e| e.to_string())
}

fn parse_directive(line: &str) -> Option<Result<(String, String), String>> {
    let rest = if let Some(rest) = line.strip_prefix("@prefix") {
        rest
    } else if line.get(..6).is_some_and(|w| w.eq_ignore_ascii_case("prefix"))
        && line.as_bytes().get(6).is_some_and(u8::is_ascii_whitespace)
    {
        &line[6..]
    } else {
        return None;
    };
    let rest = rest.trim().trim_end_matches('.').trim();
    let parsed = (|| {
        let (label, ns) = rest.split_once(':')?;
        let ns = ns.trim().strip_prefix('<')?.strip_suffix('>')?;
        Some((label.trim().to_owned(), ns.to_owned()))
    })();
    Some(parsed.ok_or_else(|| format!("malformed prefix directive {line:?}")))
}

fn tokenize(line: &str, prefixes: &PrefixMap) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '#' => break,
            '.' if chars.get(i + 1).is_none_or(|n| n.is_whitespace() || *n == '#') => {
                tokens.push(Token::Dot);
                i += 1;
            }
            '<' => {
                let (iri, next) = read_iri(&chars, i)?;
                tokens.push(Token::Term(Term::from(iri)));
                i = next;
            }
            '"' => {
                let (lit, next) = read_literal(&chars, i, prefixes)?;
                tokens.push(Token::Term(Term::Literal(lit)));
                i = next;
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() {
                    i += 1;
                }
                let mut word: String = chars[start..i].iter().collect();
                let mut dot = false;
                let trailing_only = chars[i..].iter().all(|c| c.is_whitespace());
                if trailing_only && word.len() > 1 && word.ends_with('.') {
                    word.pop();
                    dot = true;
                }
                tokens.push(Token::Term(bare_term(&word, prefixes)?));
                if dot {
                    tokens.push(Token::Dot);
                }
            }
        }
    }
    Ok(tokens)
}

fn read_iri(chars: &[char], start: usize) -> Result<(Iri, usize), String> {
    let end = chars[start + 1..]
        .iter()
        .position(|&c| c == '>')
        .map(|p| start + 1 + p)
        .ok_or_else(|| "unterminated IRI".to_owned())?;
    let value: String = chars[start + 1..end].iter().collect();
    let iri = Iri::new(unescape_uchars(&value)?).map_err(|e| e.to_string())?;
    Ok((iri, end + 1))
}

fn unescape_uchars(value: &str) -> Result<String, String> {
    if !value.contains('\\') {
        return Ok(value.to_owned());
    }
    let chars: Vec<char> = value.chars().collect();
    let mut out = String::with_capacity(value.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' {
            let (c, next) = read_uchar(&chars, i)?;
            out.push(c);
            i = next;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    Ok(out)
}

/// `\uXXXX` or `\UXXXXXXXX` starting at `chars[i] == '\\'`.
fn read_uchar(chars: &[char], i: usize) -> Result<(char, usize), String> {
    let width = match chars.get(i + 1) {
        Some('u') => 4,
        Some('U') => 8,
        _ => return Err("invalid escape".to_owned()),
    };
    let hex: String =
        chars.get(i + 2..i + 2 + width).ok_or_else(|| "truncated unicode escape".to_owned())?.iter().collect();
    let code = u32::from_str_radix(&hex, 16).map_err(|_| "invalid unicode escape".to_owned())?;
    let c = char::from_u32(code).ok_or_else(|| "invalid code point".to_owned())?;
    Ok((c, i + 2 + width))
}

fn read_literal(chars: &[char], start: usize, prefixes: &PrefixMap) -> Result<(Literal, usize), String> {
    let mut lexical = String::new();
    let mut i = start + 1;
    loop {
        let c = *chars.get(i).ok_or_else(|| "unterminated literal".to_owned())?;
        match c {
            '"' => {
                i += 1;
                break;
            }
            '\\' => {
                let esc = *chars.get(i + 1).ok_or_else(|| "unterminated escape".to_owned())?;
                match esc {
                    't' => lexical.push('\t'),
                    'b' => lexical.push('\u{8}'),
                    'n' => lexical.push('\n'),
                    'r' => lexical.push('\r'),
                    'f' => lexical.push('\u{c}'),
                    '"' => lexical.push('"'),
                    '\'' => lexical.push('\''),
                    '\\' => lexical.push('\\'),
                    'u' | 'U' => {
                        let (ch, next) = read_uchar(chars, i)?;
                        lexical.push(ch);
                        i = next;
                        continue;
                    }
                    other => return Err(format!("invalid escape \\{other}")),
                }
                i += 2;
            }
            c => {
                lexical.push(c);
                i += 1;
            }
        }
    }
    if chars.get(i) == Some(&'@') {
        let begin = i + 1;
        let mut end = begin;
        while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '-') {
            end += 1;
        }
        let tag: String = chars[begin..end].iter().collect();
        if !is_language_tag(&tag) {
            return Err(format!("invalid language tag {tag:?}"));
        }
        let lit = Literal::lang(lexical, tag).map_err(|e| e.to_string())?;
        return Ok((lit, end));
    }
    if chars.get(i) == Some(&'^') && chars.get(i + 1) == Some(&'^') {
        let begin = i + 2;
        if chars.get(begin) == Some(&'<') {
            let (dt, next) = read_iri(chars, begin)?;
            return Ok((Literal::typed(lexical, dt), next));
        }
        let mut end = begin;
        while end < chars.len() && !chars[end].is_whitespace() {
            end += 1;
        }
        let mut word: String = chars[begin..end].iter().collect();
        if chars[end..].iter().all(|c| c.is_whitespace()) && word.ends_with('.') {
            word.pop();
            end -= 1;
        }
        return match bare_term(&word, prefixes)? {
            Term::Iri { value } => Ok((Literal::typed(lexical, value), end)),
            _ => Err(format!("datatype {word:?} is not an IRI")),
        };
    }
    Ok((Literal::plain(lexical), i))
}

/// A token outside angle brackets and quotes: `a`, a prefixed name, a bare
/// absolute IRI, a blank node, or a Turtle-style number/boolean.
fn bare_term(word: &str, prefixes: &PrefixMap) -> Result<Term, String> {
    if word == "a" {
        return Ok(Term::iri(RDF_TYPE).expect("rdf:type is valid"));
    }
    if let Some(label) = word.strip_prefix("_:") {
        if is_blank_label(label) {
            return Term::blank(label).map_err(|e| e.to_string());
        }
        return Err(format!("invalid blank node {word:?}"));
    }
    if let Some(lit) = bare_literal(word) {
        return Ok(Term::Literal(lit));
    }
    let Some((label, local)) = word.split_once(':') else {
        return Err(format!("unrecognized token {word:?}"));
    };
    if !is_prefix_label(label) {
        return Err(format!("unrecognized token {word:?}"));
    }
    match prefixes.get(label) {
        Some(ns) => Term::iri(format!("{ns}{local}")).map_err(|e| e.to_string()),
        None if local.starts_with("//") => Term::iri(word).map_err(|e| e.to_string()),
        None => Err(format!("unknown prefix {label:?}")),
    }
}

fn bare_literal(word: &str) -> Option<Literal> {
    let xsd = |local: &str| Iri::new(format!("{XSD}{local}")).expect("xsd IRI is valid");
    if word == "true" || word == "false" {
        return Some(Literal::typed(word, xsd("boolean")));
    }
    let digits = word.strip_prefix(['+', '-']).unwrap_or(word);
    if digits.is_empty() || !digits.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    if digits.chars().all(|c| c.is_ascii_digit()) {
        return Some(Literal::typed(word, xsd("integer")));
    }
    let (int, frac) = digits.split_once('.')?;
    (int.chars().all(|c| c.is_ascii_digit()) && !frac.is_empty() && frac.chars().all(|c| c.is_ascii_digit()))
        .then(|| Literal::typed(word, xsd("decimal")))
}

/// Serializes a triple as one line. Without prefixes the output is canonical
/// N-Triples; with prefixes, IRIs under a bound namespace are compacted.
pub fn serialize_triple(triple: &Triple, prefixes: Option<&PrefixMap>) -> String {
    let Some(prefixes) = prefixes else {
        return triple.canonical();
    };
    let term = |t: &Term| -> String {
        match t {
            Term::Iri { value } => prefixes.compact(value.as_str()).unwrap_or_else(|| value.to_string()),
            Term::Literal(lit) => match lit.datatype() {
                Some(dt) if lit.language().is_none() => {
                    let mut out = String::from("\"");
                    super::term::escape_literal(&mut out, lit.lexical());
                    out.push_str("\"^^");
                    out.push_str(&prefixes.compact(dt.as_str()).unwrap_or_else(|| dt.to_string()));
                    out
                }
                _ => lit.to_string(),
            },
            other => other.to_string(),
        }
    };
    format!("{} {} {} .", term(triple.subject()), term(triple.predicate()), term(triple.object()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dbr(local: &str) -> Term {
        Term::iri(format!("http://dbpedia.org/resource/{local}")).unwrap()
    }
    fn dbo(local: &str) -> Term {
        Term::iri(format!("http://dbpedia.org/ontology/{local}")).unwrap()
    }

    #[test]
    fn full_iri_statement_with_literal() {
        let text = r#"<http://dbpedia.org/resource/Aristotle> <http://dbpedia.org/ontology/birthDate> "384 BC" ."#;
        let report = parse_triples(text, &PrefixMap::default());
        assert_eq!(report.triples.len(), 1);
        assert!(report.diagnostics.is_empty());
        assert_eq!(report.triples[0].object(), &Term::literal("384 BC"));
        assert_eq!(report.triples[0].subject(), &dbr("Aristotle"));
    }

    #[test]
    fn prefixed_statement_expands() {
        let mut prefixes = PrefixMap::empty();
        prefixes.insert("dbr", "http://dbpedia.org/resource/").unwrap();
        prefixes.insert("dbo", "http://dbpedia.org/ontology/").unwrap();
        let report = parse_triples("dbr:El_Greco dbo:artist dbr:View_of_Toledo .", &prefixes);
        assert_eq!(report.triples, vec![Triple::new(dbr("El_Greco"), dbo("artist"), dbr("View_of_Toledo")).unwrap()]);
    }

    #[test]
    fn empty_input() {
        let report = parse_triples("", &PrefixMap::default());
        assert_eq!(report, ParseReport::default());
    }

    #[test]
    fn prose_line_is_skipped() {
        let report = parse_triples("Here are some facts:\ndbr:A dbo:b dbr:C .", &PrefixMap::default());
        assert_eq!(report.triples.len(), 1);
        assert_eq!(report.triple_lines, vec![2]);
        assert_eq!(report.diagnostics.len(), 1);
        assert_eq!(report.diagnostics[0].line, 1);
        assert_eq!(report.diagnostics[0].severity, Severity::Skipped);
    }

    #[test]
    fn trailing_dot_is_optional_and_may_be_glued() {
        let p = PrefixMap::default();
        for line in ["dbr:A dbo:b dbr:C", "dbr:A dbo:b dbr:C.", "dbr:A dbo:b dbr:C ."] {
            let report = parse_triples(line, &p);
            assert_eq!(report.triples, vec![Triple::new(dbr("A"), dbo("b"), dbr("C")).unwrap()], "{line}");
        }
        let report = parse_triples("dbr:A dbo:b dbr:Washington,_D.C. .", &p);
        assert_eq!(report.triples[0].object(), &dbr("Washington,_D.C."));
    }

    #[test]
    fn typed_and_tagged_literals() {
        let p = PrefixMap::default();
        let report = parse_triples(
            "dbr:El_Greco dbo:birthDate \"1541-10-01\"^^xsd:date .\ndbr:A rdfs:label \"Alpha\"@en .\ndbr:A dbo:x \"y\"^^<http://e.org/dt>",
            &p,
        );
        assert_eq!(report.triples.len(), 3, "{:?}", report.diagnostics);
        let lit = report.triples[0].object().as_literal().unwrap();
        assert_eq!(lit.lexical(), "1541-10-01");
        assert_eq!(lit.datatype().unwrap().as_str(), "http://www.w3.org/2001/XMLSchema#date");
        assert_eq!(report.triples[1].object().as_literal().unwrap().language(), Some("en"));
    }

    #[test]
    fn turtle_conveniences() {
        let p = PrefixMap::default();
        let report = parse_triples(
            "@prefix ex: <http://example.org/> .\nex:a a ex:C .\ndbr:Naxos dbo:elevation 1004 .\nPREFIX q: <http://q.org/>\nq:x q:y true",
            &p,
        );
        assert_eq!(report.triples.len(), 3, "{:?}", report.diagnostics);
        assert_eq!(report.ignored_lines, 2);
        assert_eq!(report.triples[0].predicate().as_iri().unwrap().as_str(), RDF_TYPE);
        let n = report.triples[1].object().as_literal().unwrap();
        assert_eq!(n.lexical(), "1004");
        assert!(n.datatype().unwrap().as_str().ends_with("integer"));
    }

    #[test]
    fn malformed_lines_become_diagnostics() {
        let p = PrefixMap::default();
        let cases = [
            "dbr:A dbo:b",
            "dbr:A dbo:b dbr:C dbr:D .",
            "foo:A dbo:b dbr:C .",
            "\"lit\" dbo:b dbr:C .",
            "dbr:A \"p\" dbr:C .",
            "<http://a> <http://b> \"unterminated .",
            "<http://a> <http://b> <c d> .",
            "```turtle",
        ];
        for case in cases {
            let report = parse_triples(case, &p);
            assert!(report.triples.is_empty(), "{case}");
            assert_eq!(report.skipped().count(), 1, "{case}");
        }
    }

    #[test]
    fn blank_subject_parses_with_warning() {
        let report = parse_triples("_:b1 dbo:name \"x\" .", &PrefixMap::default());
        assert_eq!(report.triples.len(), 1);
        assert_eq!(report.warnings().count(), 1);
        assert_eq!(report.skipped().count(), 0);
    }

    #[test]
    fn comment_after_statement() {
        let report =
            parse_triples("<http://a.org/x> <http://a.org/p> <http://a.org/y> . # note", &PrefixMap::default());
        assert_eq!(report.triples.len(), 1);
    }

    #[test]
    fn serialize_canonical_and_compact() {
        let t = Triple::new(dbr("A"), dbo("b"), Term::literal("x")).unwrap();
        assert_eq!(
            serialize_triple(&t, None),
            r#"<http://dbpedia.org/resource/A> <http://dbpedia.org/ontology/b> "x" ."#
        );
        let p = PrefixMap::default();
        assert_eq!(serialize_triple(&t, Some(&p)), r#"dbr:A dbo:b "x" ."#);
        let q = Triple::new(dbr("A"), dbo("b"), Term::literal("a \"quoted\" word")).unwrap();
        let line = serialize_triple(&q, None);
        assert!(line.contains(r#"\"quoted\""#));
        assert_eq!(parse_triples(&line, &p).triples, vec![q]);
    }
}
