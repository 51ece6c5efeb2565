//! Labelled fact collections and their evaluation: C1-C4 outcome classes,
//! rule usage, cosine histograms, timings and collection statistics.
//!
//! The outcome class computed here is an automatic proxy. A fact counts as
//! validated when rule A fired, or when its best match scores at least `tau`
//! and is not contradicted by an equally scored match from another source.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::Backend;
use crate::encoder::EncoderHandle;
use crate::rdf::{Iri, PrefixMap, Term, Triple};
use crate::remote::SparqlClient;
use crate::store::KnowledgeGraph;
use crate::validator::{Rule, ValidateError, ValidationResult, Validator, Via};

pub const DEFAULT_TAU: f64 = 0.9;
pub const CONTRADICTION_EPSILON: f64 = 0.01;
pub const HISTOGRAM_BINS: usize = 40;
pub const BIN_WIDTH: f64 = 0.05;
pub const DEFAULT_TOP_PREDICATES: usize = 10;
pub const PROXY_NOTE: &str = "automatic proxy: validated = rule A, or best match score >= tau \
     without an equally scored contradicting match from another source";

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("benchmark line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("tau must lie in [-1, 1], got {0}")]
    Tau(f64),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("writing output: {0}")]
    Output(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gold {
    Correct,
    Erroneous,
}

impl Gold {
    pub fn as_str(self) -> &'static str {
        match self {
            Gold::Correct => "correct",
            Gold::Erroneous => "erroneous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Persons,
    Places,
    Events,
    Other,
}

impl Part {
    pub const ALL: [Part; 4] = [Part::Persons, Part::Places, Part::Events, Part::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Part::Persons => "persons",
            Part::Places => "places",
            Part::Events => "events",
            Part::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OutcomeClass {
    C1,
    C2,
    C3,
    C4,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 4] = [OutcomeClass::C1, OutcomeClass::C2, OutcomeClass::C3, OutcomeClass::C4];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::C1 => "C1",
            OutcomeClass::C2 => "C2",
            OutcomeClass::C3 => "C3",
            OutcomeClass::C4 => "C4",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkRecord {
    pub fact: Triple,
    pub gold: Gold,
    pub entity: String,
    pub part: Part,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    s: String,
    p: String,
    o: String,
    #[serde(default)]
    o_kind: Option<String>,
    gold: Gold,
    entity: String,
    part: Part,
}

/// Accepts `<iri>`, a prefixed name with a known prefix, or an absolute IRI.
fn resolve_iri(text: &str, prefixes: &PrefixMap) -> Result<Term, String> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Term::iri(inner).map_err(|e| e.to_string());
    }
    if let Some(expanded) = prefixes.expand(text) {
        return Term::iri(expanded).map_err(|e| e.to_string());
    }
    Term::iri(text).map_err(|e| format!("{text:?} is neither a known prefixed name nor an IRI: {e}"))
}

impl BenchmarkRecord {
    fn from_raw(raw: RawRecord, prefixes: &PrefixMap) -> Result<Self, String> {
        let subject = resolve_iri(&raw.s, prefixes).map_err(|e| format!("subject: {e}"))?;
        let predicate = resolve_iri(&raw.p, prefixes).map_err(|e| format!("predicate: {e}"))?;
        let object = match raw.o_kind.as_deref() {
            Some("literal") => Term::literal(raw.o),
            Some("iri") => resolve_iri(&raw.o, prefixes).map_err(|e| format!("object: {e}"))?,
            Some(other) => return Err(format!("o_kind must be \"iri\" or \"literal\", got {other:?}")),
            None => resolve_iri(&raw.o, prefixes).unwrap_or_else(|_| Term::literal(raw.o)),
        };
        let fact = Triple::new(subject, predicate, object).map_err(|e| e.to_string())?;
        Ok(Self { fact, gold: raw.gold, entity: raw.entity, part: raw.part })
    }
}

/// Parses JSON-Lines benchmark text. Blank lines are skipped; any other
/// malformed line is an error naming its 1-based line number.
pub fn parse_benchmark(text: &str, prefixes: &PrefixMap) -> Result<Vec<BenchmarkRecord>, BenchmarkError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| BenchmarkError::Line { line: idx + 1, message };
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        out.push(BenchmarkRecord::from_raw(raw, prefixes).map_err(err)?);
    }
    Ok(out)
}

pub fn load_benchmark(path: &Path, prefixes: &PrefixMap) -> Result<Vec<BenchmarkRecord>, BenchmarkError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchmarkError::Io { path: path.to_owned(), source })?;
    parse_benchmark(&text, prefixes)
}

/// Whether the best match is matched, within [`CONTRADICTION_EPSILON`], by a
/// match from another source giving a different object for the same subject
/// and predicate.
pub fn best_is_contradicted(result: &ValidationResult) -> bool {
    let Some((best, rest)) = result.matches.split_first() else {
        return false;
    };
    let bt = &best.triple.triple;
    rest.iter().any(|m| {
        let t = &m.triple.triple;
        t.subject() == bt.subject()
            && t.predicate() == bt.predicate()
            && t.object().lexical_key() != bt.object().lexical_key()
            && m.triple.source != best.triple.source
            && (best.score - m.score).abs() <= CONTRADICTION_EPSILON
    })
}

pub fn is_validated(result: &ValidationResult, tau: f64) -> bool {
    match result.best() {
        None => false,
        Some(_) if result.rule == Rule::A => true,
        Some(best) => best.score >= tau && !best_is_contradicted(result),
    }
}

pub fn classify(result: &ValidationResult, gold: Gold, tau: f64) -> OutcomeClass {
    match (gold, is_validated(result, tau)) {
        (Gold::Correct, true) => OutcomeClass::C1,
        (Gold::Correct, false) => OutcomeClass::C2,
        (Gold::Erroneous, true) => OutcomeClass::C3,
        (Gold::Erroneous, false) => OutcomeClass::C4,
    }
}

/// Rule-usage row label: rule B is split by how its best match was found.
pub fn rule_row(result: &ValidationResult) -> &'static str {
    match result.rule {
        Rule::A => "A",
        Rule::B => match result.best().map(|m| m.via) {
            Some(Via::SameObject) => "B-SO",
            _ => "B-SP",
        },
        Rule::C => "C",
    }
}

pub const RULE_ROWS: [&str; 4] = ["A", "B-SP", "B-SO", "C"];

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub k: usize,
    pub tau: f64,
    pub parallelism: usize,
    pub timings: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { k: crate::validator::DEFAULT_K, tau: DEFAULT_TAU, parallelism: 1, timings: false }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<(), BenchmarkError> {
        if !(-1.0..=1.0).contains(&self.tau) {
            return Err(BenchmarkError::Tau(self.tau));
        }
        if self.k == 0 {
            return Err(BenchmarkError::ZeroK);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassSummary {
    pub part: String,
    pub total: usize,
    pub correct: usize,
    pub erroneous: usize,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
    pub errored: usize,
    /// C1 / (C1 + C2), as a percentage.
    pub c1_pct: Option<f64>,
    /// C3 / (C3 + C4), as a percentage.
    pub c3_pct: Option<f64>,
}

impl ClassSummary {
    fn new(part: &str) -> Self {
        Self { part: part.to_owned(), ..Self::default() }
    }

    fn add(&mut self, gold: Gold, class: Option<OutcomeClass>) {
        self.total += 1;
        match gold {
            Gold::Correct => self.correct += 1,
            Gold::Erroneous => self.erroneous += 1,
        }
        match class {
            Some(OutcomeClass::C1) => self.c1 += 1,
            Some(OutcomeClass::C2) => self.c2 += 1,
            Some(OutcomeClass::C3) => self.c3 += 1,
            Some(OutcomeClass::C4) => self.c4 += 1,
            None => self.errored += 1,
        }
    }

    fn finish(&mut self) {
        self.c1_pct = percent(self.c1, self.c1 + self.c2);
        self.c3_pct = percent(self.c3, self.c3 + self.c4);
    }

    pub fn count(&self, class: OutcomeClass) -> usize {
        [self.c1, self.c2, self.c3, self.c4][class.index()]
    }
}

/// Percentage rounded to two decimals; `None` for an empty denominator.
pub fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| (num as f64 * 10000.0 / den as f64).round() / 100.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleUsageRow {
    pub rule: String,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub start: f64,
    pub end: f64,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
}

impl HistogramBin {
    pub fn total(&self) -> usize {
        self.c1 + self.c2 + self.c3 + self.c4
    }
}

/// Index of the bin holding `score`; 1.0 falls in the last bin.
pub fn histogram_bin(score: f64) -> usize {
    let idx = ((score.clamp(-1.0, 1.0) + 1.0) / BIN_WIDTH).floor();
    (idx as usize).min(HISTOGRAM_BINS - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub group: String,
    pub count: usize,
    pub mean_retrieval_ms: f64,
    pub mean_encoding_ms: f64,
    pub mean_ranking_ms: f64,
    pub mean_total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingSummary {
    pub per_rule: Vec<TimingRow>,
    pub per_part: Vec<TimingRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub k: usize,
    pub tau: f64,
    pub backend: String,
    pub encoder: String,
    pub encoder_model: String,
    pub dimension: usize,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordError {
    pub index: usize,
    pub fact: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub config: ReportConfig,
    pub parts: Vec<ClassSummary>,
    pub overall: ClassSummary,
    pub rule_usage: Vec<RuleUsageRow>,
    pub histogram: Vec<HistogramBin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<TimingSummary>,
    pub errors: Vec<RecordError>,
}

/// Per-record outcome kept for the annotation worksheet.
#[derive(Debug)]
pub struct RecordOutcome<'a> {
    pub record: &'a BenchmarkRecord,
    pub result: Result<ValidationResult, ValidateError>,
    pub class: Option<OutcomeClass>,
}

#[derive(Debug)]
pub struct Evaluation<'a> {
    pub report: EvaluationReport,
    pub outcomes: Vec<RecordOutcome<'a>>,
}

fn timing_row(group: &str, samples: &[Duration; 3], count: usize) -> TimingRow {
    let mean = |d: Duration| if count == 0 { 0.0 } else { d.as_secs_f64() * 1000.0 / count as f64 };
    TimingRow {
        group: group.to_owned(),
        count,
        mean_retrieval_ms: mean(samples[0]),
        mean_encoding_ms: mean(samples[1]),
        mean_ranking_ms: mean(samples[2]),
        mean_total_ms: mean(samples[0] + samples[1] + samples[2]),
    }
}

/// Validates every record and aggregates the outcome report.
pub fn evaluate<'a>(
    records: &'a [BenchmarkRecord],
    backend: &dyn Backend,
    enc: &EncoderHandle,
    validator: &Validator,
    opts: EvalOptions,
) -> Result<Evaluation<'a>, BenchmarkError> {
    opts.validate()?;
    let facts: Vec<Triple> = records.iter().map(|r| r.fact.clone()).collect();
    let results = validator.validate_batch(&facts, backend, enc, opts.k, opts.parallelism);

    let mut parts: BTreeMap<Part, ClassSummary> =
        Part::ALL.iter().map(|p| (*p, ClassSummary::new(p.as_str()))).collect();
    let mut overall = ClassSummary::new("overall");
    let mut usage: BTreeMap<&str, [usize; 4]> = RULE_ROWS.iter().map(|r| (*r, [0; 4])).collect();
    let mut histogram: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistogramBin {
            start: (i as f64 * 5.0 - 100.0) / 100.0,
            end: ((i + 1) as f64 * 5.0 - 100.0) / 100.0,
            c1: 0,
            c2: 0,
            c3: 0,
            c4: 0,
        })
        .collect();
    let mut rule_time: BTreeMap<&str, ([Duration; 3], usize)> = BTreeMap::new();
    let mut part_time: BTreeMap<Part, ([Duration; 3], usize)> = BTreeMap::new();
    let mut errors = Vec::new();
    let mut outcomes = Vec::with_capacity(records.len());

    for (index, (record, result)) in records.iter().zip(results).enumerate() {
        let class = match &result {
            Ok(res) => {
                let class = classify(res, record.gold, opts.tau);
                usage.get_mut(rule_row(res)).expect("row exists")[class.index()] += 1;
                if let Some(best) = res.best() {
                    let bin = &mut histogram[histogram_bin(best.score)];
                    match class {
                        OutcomeClass::C1 => bin.c1 += 1,
                        OutcomeClass::C2 => bin.c2 += 1,
                        OutcomeClass::C3 => bin.c3 += 1,
                        OutcomeClass::C4 => bin.c4 += 1,
                    }
                }
                let t = res.timings;
                let phases = [t.candidate_retrieval, t.encoding, t.ranking];
                let rule = match res.rule {
                    Rule::A => "A",
                    Rule::B => "B",
                    Rule::C => "C",
                };
                for (slot, d) in rule_time.entry(rule).or_default().0.iter_mut().zip(phases) {
                    *slot += d;
                }
                rule_time.get_mut(rule).expect("inserted").1 += 1;
                let entry = part_time.entry(record.part).or_default();
                for (slot, d) in entry.0.iter_mut().zip(phases) {
                    *slot += d;
                }
                entry.1 += 1;
                Some(class)
            }
            Err(e) => {
                errors.push(RecordError { index, fact: record.fact.canonical(), message: e.to_string() });
                None
            }
        };
        parts.get_mut(&record.part).expect("all parts present").add(record.gold, class);
        overall.add(record.gold, class);
        outcomes.push(RecordOutcome { record, result, class });
    }

    let mut parts: Vec<ClassSummary> = parts.into_values().collect();
    for p in &mut parts {
        p.finish();
    }
    overall.finish();
    let timings = opts.timings.then(|| TimingSummary {
        per_rule: rule_time.iter().map(|(rule, (d, n))| timing_row(rule, d, *n)).collect(),
        per_part: part_time.iter().map(|(part, (d, n))| timing_row(part.as_str(), d, *n)).collect(),
    });
    let report = EvaluationReport {
        config: ReportConfig {
            k: opts.k,
            tau: opts.tau,
            backend: backend.name().to_owned(),
            encoder: enc.kind().to_owned(),
            encoder_model: enc.model_name().to_owned(),
            dimension: enc.dimension(),
            classification: PROXY_NOTE.to_owned(),
        },
        parts,
        overall,
        rule_usage: RULE_ROWS
            .iter()
            .map(|r| {
                let c = usage[r];
                RuleUsageRow { rule: (*r).to_owned(), c1: c[0], c2: c[1], c3: c[2], c4: c[3] }
            })
            .collect(),
        histogram,
        timings,
        errors,
    };
    Ok(Evaluation { report, outcomes })
}

fn output_err(e: impl std::fmt::Display) -> BenchmarkError {
    BenchmarkError::Output(e.to_string())
}

/// Annotation worksheet: one row per record with the top-`k` matches and an
/// empty `human_class` column.
pub fn write_worksheet<W: Write>(outcomes: &[RecordOutcome<'_>], k: usize, out: W) -> Result<(), BenchmarkError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["fact", "gold", "part", "entity", "rule", "pair", "auto_class", "error"]
        .iter()
        .map(|s| (*s).to_owned())
        .collect();
    for i in 1..=k {
        header.push(format!("match_{i}_triple"));
        header.push(format!("match_{i}_source"));
        header.push(format!("match_{i}_score"));
    }
    header.push("human_class".to_owned());
    w.write_record(&header).map_err(output_err)?;
    for o in outcomes {
        let mut row = vec![
            o.record.fact.canonical(),
            o.record.gold.as_str().to_owned(),
            o.record.part.as_str().to_owned(),
            o.record.entity.clone(),
        ];
        match &o.result {
            Ok(res) => {
                row.push(res.rule.to_string());
                row.push(rule_row(res).to_owned());
                row.push(o.class.map(|c| c.as_str()).unwrap_or_default().to_owned());
                row.push(String::new());
                for i in 0..k {
                    match res.matches.get(i) {
                        Some(m) => {
                            row.push(m.triple.triple.canonical());
                            row.push(m.triple.source.clone());
                            row.push(format!("{:.6}", m.score));
                        }
                        None => row.extend([String::new(), String::new(), String::new()]),
                    }
                }
            }
            Err(e) => {
                row.extend([String::new(), String::new(), "errored".to_owned(), e.to_string()]);
                row.extend(std::iter::repeat_n(String::new(), 3 * k));
            }
        }
        row.push(String::new());
        w.write_record(&row).map_err(output_err)?;
    }
    w.flush().map_err(output_err)
}

pub fn write_histogram_csv<W: Write>(report: &EvaluationReport, out: W) -> Result<(), BenchmarkError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_start", "bin_end", "c1", "c2", "c3", "c4"]).map_err(output_err)?;
    for b in &report.histogram {
        w.write_record([
            format!("{:.2}", b.start),
            format!("{:.2}", b.end),
            b.c1.to_string(),
            b.c2.to_string(),
            b.c3.to_string(),
            b.c4.to_string(),
        ])
        .map_err(output_err)?;
    }
    w.flush().map_err(output_err)
}

/// Left-aligned first column, right-aligned rest.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "  {cell:>w$}");
            }
        }
        s.trim_end().to_owned()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:.2}%"))
}

pub fn render_report_text(report: &EvaluationReport) -> String {
    let c = &report.config;
    let mut out = format!(
        "backend: {}\nencoder: {} ({}, dim {})\nk: {}  tau: {}\nclassification: {}\n\n",
        c.backend, c.encoder, c.encoder_model, c.dimension, c.k, c.tau, c.classification
    );
    let rows: Vec<Vec<String>> = report
        .parts
        .iter()
        .chain(std::iter::once(&report.overall))
        .map(|p| {
            vec![
                p.part.clone(),
                p.total.to_string(),
                p.c1.to_string(),
                p.c2.to_string(),
                p.c3.to_string(),
                p.c4.to_string(),
                p.errored.to_string(),
                pct(p.c1_pct),
                pct(p.c3_pct),
            ]
        })
        .collect();
    out.push_str("Outcome classes\n");
    out.push_str(&render_table(&["part", "facts", "C1", "C2", "C3", "C4", "errored", "C1%", "C3%"], &rows));
    out.push_str("\nRule usage\n");
    let rows: Vec<Vec<String>> = report
        .rule_usage
        .iter()
        .map(|r| vec![r.rule.clone(), r.c1.to_string(), r.c2.to_string(), r.c3.to_string(), r.c4.to_string()])
        .collect();
    out.push_str(&render_table(&["rule", "C1", "C2", "C3", "C4"], &rows));
    out.push_str("\nBest-match cosine histogram (non-empty bins)\n");
    let rows: Vec<Vec<String>> = report
        .histogram
        .iter()
        .filter(|b| b.total() > 0)
        .map(|b| {
            vec![
                format!("[{:.2}, {:.2})", b.start, b.end),
                b.c1.to_string(),
                b.c2.to_string(),
                b.c3.to_string(),
                b.c4.to_string(),
            ]
        })
        .collect();
    out.push_str(&render_table(&["bin", "C1", "C2", "C3", "C4"], &rows));
    if let Some(t) = &report.timings {
        for (title, group) in [("Mean time per rule (ms)", &t.per_rule), ("Mean time per part (ms)", &t.per_part)] {
            let _ = write!(out, "\n{title}\n");
            let rows: Vec<Vec<String>> = group
                .iter()
                .map(|r| {
                    vec![
                        r.group.clone(),
                        r.count.to_string(),
                        format!("{:.3}", r.mean_retrieval_ms),
                        format!("{:.3}", r.mean_encoding_ms),
                        format!("{:.3}", r.mean_ranking_ms),
                        format!("{:.3}", r.mean_total_ms),
                    ]
                })
                .collect();
            out.push_str(&render_table(&["group", "facts", "retrieval", "encoding", "ranking", "total"], &rows));
        }
    }
    if !report.errors.is_empty() {
        out.push_str("\nErrored records\n");
        for e in &report.errors {
            let _ = writeln!(out, "#{} {}: {}", e.index, e.fact, e.message);
        }
    }
    out
}

/// Something that can tell whether an IRI is mentioned by a reference graph.
pub trait DereferenceCheck {
    fn is_dereferencable(&self, iri: &Iri) -> Result<bool, String>;
}

impl DereferenceCheck for KnowledgeGraph {
    fn is_dereferencable(&self, iri: &Iri) -> Result<bool, String> {
        Ok(self.mentions(iri))
    }
}

impl DereferenceCheck for SparqlClient {
    fn is_dereferencable(&self, iri: &Iri) -> Result<bool, String> {
        self.check_dereferencable(iri).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Dereferenceability {
    Checked { resources: usize, resources_dereferencable: usize, properties: usize, properties_dereferencable: usize },
    Unavailable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartStats {
    pub part: String,
    pub total: usize,
    pub correct: usize,
    pub erroneous: usize,
    pub correct_pct: Option<f64>,
    pub erroneous_pct: Option<f64>,
    pub unique_resources: usize,
    pub unique_properties: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateRow {
    pub predicate: String,
    pub total: usize,
    pub correct: usize,
    pub erroneous: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartPredicates {
    pub part: String,
    pub rows: Vec<PredicateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkStats {
    pub parts: Vec<PartStats>,
    pub overall: PartStats,
    pub dereferenceability: Dereferenceability,
    pub top_predicates: Vec<PartPredicates>,
}

fn part_stats(name: &str, records: &[&BenchmarkRecord]) -> PartStats {
    let correct = records.iter().filter(|r| r.gold == Gold::Correct).count();
    let (resources, properties) = unique_terms(records.iter().copied());
    PartStats {
        part: name.to_owned(),
        total: records.len(),
        correct,
        erroneous: records.len() - correct,
        correct_pct: percent(correct, records.len()),
        erroneous_pct: percent(records.len() - correct, records.len()),
        unique_resources: resources.len(),
        unique_properties: properties.len(),
    }
}

/// Resource IRIs (subjects and IRI objects) and property IRIs.
fn unique_terms<'a>(records: impl Iterator<Item = &'a BenchmarkRecord>) -> (BTreeSet<Iri>, BTreeSet<Iri>) {
    let mut resources = BTreeSet::new();
    let mut properties = BTreeSet::new();
    for r in records {
        for term in [r.fact.subject(), r.fact.object()] {
            if let Some(iri) = term.as_iri() {
                resources.insert(iri.clone());
            }
        }
        if let Some(iri) = r.fact.predicate().as_iri() {
            properties.insert(iri.clone());
        }
    }
    (resources, properties)
}

/// Collection statistics: gold splits, unique URIs, dereferenceability and
/// the most frequent predicates per part.
pub fn benchmark_stats(
    records: &[BenchmarkRecord],
    deref: Option<&dyn DereferenceCheck>,
    prefixes: &PrefixMap,
    top_n: usize,
) -> BenchmarkStats {
    let by_part: BTreeMap<Part, Vec<&BenchmarkRecord>> =
        Part::ALL.iter().map(|p| (*p, records.iter().filter(|r| r.part == *p).collect())).collect();
    let all: Vec<&BenchmarkRecord> = records.iter().collect();
    let parts = by_part.iter().filter(|(_, rs)| !rs.is_empty()).map(|(p, rs)| part_stats(p.as_str(), rs)).collect();

    let dereferenceability = match deref {
        None => Dereferenceability::Unavailable { reason: "no endpoint configured".to_owned() },
        Some(check) => {
            let (resources, properties) = unique_terms(records.iter());
            let count = |set: &BTreeSet<Iri>| -> Result<usize, String> {
                let mut n = 0;
                for iri in set {
                    if check.is_dereferencable(iri)? {
                        n += 1;
                    }
                }
                Ok(n)
            };
            match count(&resources).and_then(|r| Ok((r, count(&properties)?))) {
                Ok((r, p)) => Dereferenceability::Checked {
                    resources: resources.len(),
                    resources_dereferencable: r,
                    properties: properties.len(),
                    properties_dereferencable: p,
                },
                Err(reason) => Dereferenceability::Unavailable { reason },
            }
        }
    };

    let top_predicates = by_part
        .iter()
        .filter(|(_, rs)| !rs.is_empty())
        .map(|(part, rs)| {
            let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
            for r in rs {
                let p = r.fact.predicate().as_iri().expect("predicate is an IRI").as_str();
                let name = prefixes.compact(p).unwrap_or_else(|| p.to_owned());
                let entry = counts.entry(name).or_default();
                match r.gold {
                    Gold::Correct => entry.0 += 1,
                    Gold::Erroneous => entry.1 += 1,
                }
            }
            let mut rows: Vec<PredicateRow> = counts
                .into_iter()
                .map(|(predicate, (c, e))| PredicateRow { predicate, total: c + e, correct: c, erroneous: e })
                .collect();
            rows.sort_by(|a, b| b.total.cmp(&a.total).then_with(|| a.predicate.cmp(&b.predicate)));
            rows.truncate(top_n);
            PartPredicates { part: part.as_str().to_owned(), rows }
        })
        .collect();

    BenchmarkStats { parts, overall: part_stats("overall", &all), dereferenceability, top_predicates }
}

pub fn render_stats_text(stats: &BenchmarkStats) -> String {
    let mut out = String::from("Collection\n");
    let rows: Vec<Vec<String>> = stats
        .parts
        .iter()
        .chain(std::iter::once(&stats.overall))
        .map(|p| {
            vec![
                p.part.clone(),
                p.total.to_string(),
                format!("{} ({})", p.correct, pct(p.correct_pct)),
                format!("{} ({})", p.erroneous, pct(p.erroneous_pct)),
                p.unique_resources.to_string(),
                p.unique_properties.to_string(),
            ]
        })
        .collect();
    out.push_str(&render_table(&["part", "facts", "correct", "erroneous", "unique URIs", "unique properties"], &rows));
    out.push_str("\nDereferenceability\n");
    match &stats.dereferenceability {
        Dereferenceability::Checked { resources, resources_dereferencable, properties, properties_dereferencable } => {
            let _ = writeln!(out, "resources: {resources_dereferencable} of {resources}");
            let _ = writeln!(out, "properties: {properties_dereferencable} of {properties}");
        }
        Dereferenceability::Unavailable { reason } => {
            let _ = writeln!(out, "unavailable ({reason})");
        }
    }
    for part in &stats.top_predicates {
        let _ = write!(out, "\nTop predicates: {}\n", part.part);
        let rows: Vec<Vec<String>> = part
            .rows
            .iter()
            .map(|r| vec![r.predicate.clone(), r.total.to_string(), r.correct.to_string(), r.erroneous.to_string()])
            .collect();
        out.push_str(&render_table(&["predicate", "facts", "correct", "erroneous"], &rows));
    }
    out
}
