//! Dataset and prediction files, plus CGPS-style input prefixing.
//!
//! Example lines are JSON objects
//! `{"id", "input", "output", "derivation"?, "meta"?}` where `input` and
//! `output` are space-separated token strings (token arrays are accepted on
//! read). TSV files carry `input<TAB>output` per line. Prediction lines are
//! `{"id", "prediction", "replica"}`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scan::DerivationTrace;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate example id {0:?}")]
    DuplicateId(String),
    #[error("example {0:?} is already prefixed")]
    AlreadyPrefixed(String),
    #[error("unknown format {0:?} (expected jsonl or tsv)")]
    UnknownFormat(String),
}

impl DatasetError {
    fn io(path: &Path, source: io::Error) -> Self {
        DatasetError::Io { path: path.to_path_buf(), source }
    }
}

/// One dataset record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub id: String,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub derivation: Option<DerivationTrace>,
    pub meta: BTreeMap<String, String>,
}

impl Example {
    pub fn new(id: impl Into<String>, input: &str, output: &str) -> Self {
        Example {
            id: id.into(),
            input: tokenize(input),
            output: tokenize(output),
            derivation: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn input_text(&self) -> String {
        self.input.join(" ")
    }

    pub fn output_text(&self) -> String {
        self.output.join(" ")
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// Deterministic id derived from the example content.
pub fn content_id(input: &[String], output: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(input.join(" ").as_bytes());
    h.update(b"\t");
    h.update(output.join(" ").as_bytes());
    format!("h{}", &hex::encode(h.finalize())[..16])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TokenField {
    Text(String),
    List(Vec<String>),
}

impl TokenField {
    fn into_tokens(self) -> Vec<String> {
        match self {
            TokenField::Text(s) => tokenize(&s),
            TokenField::List(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExampleIn {
    id: Option<String>,
    input: TokenField,
    output: TokenField,
    #[serde(default)]
    derivation: Option<DerivationTrace>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct ExampleOut<'a> {
    id: &'a str,
    input: String,
    output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation: Option<&'a DerivationTrace>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    meta: &'a BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Tsv,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv" | "txt") => Format::Tsv,
            _ => Format::Jsonl,
        }
    }
}

impl FromStr for Format {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            other => Err(DatasetError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn load_dataset(path: &Path, format: Format) -> Result<Vec<Example>, DatasetError> {
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        Format::Jsonl => read_jsonl(reader),
        Format::Tsv => read_tsv(reader),
    }
}

fn lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), DatasetError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(DatasetError::Malformed { line: i + 1, message: e.to_string() })),
    })
}

fn finish(mut examples: Vec<(usize, Example)>) -> Result<Vec<Example>, DatasetError> {
    let mut seen = HashSet::new();
    for (line, ex) in &mut examples {
        if ex.input.is_empty() || ex.output.is_empty() {
            return Err(DatasetError::Malformed { line: *line, message: "empty input or output".into() });
        }
        if ex.id.is_empty() {
            ex.id = content_id(&ex.input, &ex.output);
        }
        if !seen.insert(ex.id.clone()) {
            return Err(DatasetError::DuplicateId(ex.id.clone()));
        }
    }
    Ok(examples.into_iter().map(|(_, ex)| ex).collect())
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<Example>, DatasetError> {
    let mut out = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let rec: ExampleIn = serde_json::from_str(&text)
            .map_err(|e| DatasetError::Malformed { line, message: e.to_string() })?;
        out.push((
            line,
            Example {
                id: rec.id.unwrap_or_default(),
                input: rec.input.into_tokens(),
                output: rec.output.into_tokens(),
                derivation: rec.derivation,
                meta: rec.meta,
            },
        ));
    }
    finish(out)
}

pub fn read_tsv<R: BufRead>(reader: R) -> Result<Vec<Example>, DatasetError> {
    let mut out = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let Some((input, output)) = text.split_once('\t') else {
            return Err(DatasetError::Malformed { line, message: "expected input<TAB>output".into() });
        };
        out.push((line, Example::new("", input, output)));
    }
    finish(out)
}

pub fn write_jsonl<W: Write>(mut w: W, examples: &[Example]) -> io::Result<()> {
    for ex in examples {
        let rec = ExampleOut {
            id: &ex.id,
            input: ex.input_text(),
            output: ex.output_text(),
            derivation: ex.derivation.as_ref(),
            meta: &ex.meta,
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_tsv<W: Write>(mut w: W, examples: &[Example]) -> io::Result<()> {
    for ex in examples {
        writeln!(w, "{}\t{}", ex.input_text(), ex.output_text())?;
    }
    w.flush()
}

pub fn save_dataset(path: &Path, format: Format, examples: &[Example]) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(|e| DatasetError::io(path, e))?;
    let w = BufWriter::new(file);
    match format {
        Format::Jsonl => write_jsonl(w, examples),
        Format::Tsv => write_tsv(w, examples),
    }
    .map_err(|e| DatasetError::io(path, e))
}

/// Map from example id to its position.
pub fn index_by_id(examples: &[Example]) -> HashMap<&str, usize> {
    examples.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect()
}

/// One model output for one example in one replica run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub id: String,
    pub prediction: Vec<String>,
    pub replica: usize,
}

#[derive(Deserialize)]
struct PredictionIn {
    id: String,
    prediction: TokenField,
    #[serde(default)]
    replica: usize,
}

#[derive(Serialize)]
struct PredictionOut<'a> {
    id: &'a str,
    prediction: String,
    replica: usize,
}

pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<PredictionRecord>, DatasetError> {
    let mut out = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let rec: PredictionIn = serde_json::from_str(&text)
            .map_err(|e| DatasetError::Malformed { line, message: e.to_string() })?;
        out.push(PredictionRecord { id: rec.id, prediction: rec.prediction.into_tokens(), replica: rec.replica });
    }
    Ok(out)
}

pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRecord>, DatasetError> {
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    read_predictions(BufReader::new(file))
}

pub fn write_predictions<W: Write>(mut w: W, preds: &[PredictionRecord]) -> io::Result<()> {
    for p in preds {
        let rec = PredictionOut { id: &p.id, prediction: p.prediction.join(" "), replica: p.replica };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Which output tokens a model can copy or translate from its input.
///
/// An output token is mappable when some token of the example input maps to
/// it, or when `default_mappable` is set. Tokens in `non_mappable` never are.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappableVocabulary {
    #[serde(default)]
    pub map: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub default_mappable: bool,
    #[serde(default)]
    pub non_mappable: BTreeSet<String>,
}

pub const PLACEHOLDER_PREFIX: &str = "<p";

pub fn placeholder(i: usize) -> String {
    format!("<p{i}>")
}

impl MappableVocabulary {
    /// SCAN command words to actions.
    pub fn scan_default() -> Self {
        let pairs = [
            ("jump", "JUMP"),
            ("walk", "WALK"),
            ("run", "RUN"),
            ("look", "LOOK"),
            ("left", "LTURN"),
            ("right", "RTURN"),
        ];
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, o) in pairs {
            map.entry(i.to_string()).or_default().insert(o.to_string());
        }
        MappableVocabulary { map, default_mappable: false, non_mappable: BTreeSet::new() }
    }

    /// Everything mappable except SPARQL keywords and punctuation.
    pub fn cfq_default() -> Self {
        let keywords = [
            "SELECT", "DISTINCT", "ASK", "WHERE", "FILTER", "count(*)", "count", "*", "a", "{", "}", ".", ",", "(",
            ")", "!=", "=",
        ];
        MappableVocabulary {
            map: BTreeMap::new(),
            default_mappable: true,
            non_mappable: keywords.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn is_mappable(&self, input: &[String], token: &str) -> bool {
        if self.non_mappable.contains(token) {
            return false;
        }
        self.default_mappable || input.iter().any(|i| self.map.get(i).is_some_and(|outs| outs.contains(token)))
    }

    /// Number of output token occurrences the input cannot account for.
    pub fn non_mappable_count(&self, example: &Example) -> usize {
        example.output.iter().filter(|t| !self.is_mappable(&example.input, t)).count()
    }
}

fn is_prefixed(example: &Example) -> bool {
    example.input.first().is_some_and(|t| t == &placeholder(0))
}

/// Prepends one distinct placeholder per non-mappable output token.
pub fn cgps_prefix(example: &Example, vocab: &MappableVocabulary) -> Result<Example, DatasetError> {
    let n = vocab.non_mappable_count(example);
    prefix_with(example, n)
}

fn prefix_with(example: &Example, n: usize) -> Result<Example, DatasetError> {
    if is_prefixed(example) {
        return Err(DatasetError::AlreadyPrefixed(example.id.clone()));
    }
    let mut out = example.clone();
    out.input = (0..n).map(placeholder).chain(example.input.iter().cloned()).collect();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrefixLength {
    #[default]
    PerExample,
    /// Every input gets the dataset-wide maximum count.
    Global,
}

pub fn cgps_prefix_dataset(
    examples: &[Example],
    vocab: &MappableVocabulary,
    length: PrefixLength,
) -> Result<Vec<Example>, DatasetError> {
    match length {
        PrefixLength::PerExample => examples.iter().map(|e| cgps_prefix(e, vocab)).collect(),
        PrefixLength::Global => {
            let n = examples.iter().map(|e| vocab.non_mappable_count(e)).max().unwrap_or(0);
            examples.iter().map(|e| prefix_with(e, n)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_line() {
        let ds = read_tsv("jump\tJUMP\n".as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].input, vec!["jump"]);
        assert_eq!(ds[0].output, vec!["JUMP"]);
        assert_eq!(ds[0].id, content_id(&ds[0].input, &ds[0].output));
    }

    #[test]
    fn tsv_without_tab_reports_line() {
        let err = read_tsv("jump\tJUMP\n\nwalk WALK\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::Malformed { line: 3, .. }), "{err}");
    }

    #[test]
    fn jsonl_with_derivation() {
        let line = r#"{"id":"a","input":"jump","output":"JUMP","derivation":"conj_single(rep_once(interp_bare(prim_jump)))"}"#;
        let ds = read_jsonl(line.as_bytes()).unwrap();
        let trace = ds[0].derivation.as_ref().unwrap();
        assert_eq!(trace.tokens().unwrap(), vec!["jump"]);
    }

    #[test]
    fn jsonl_accepts_token_arrays() {
        let line = r#"{"id":"a","input":["turn","left"],"output":["LTURN"]}"#;
        let ds = read_jsonl(line.as_bytes()).unwrap();
        assert_eq!(ds[0].input_text(), "turn left");
    }

    #[test]
    fn duplicate_ids() {
        let text = "{\"id\":\"a\",\"input\":\"jump\",\"output\":\"JUMP\"}\n{\"id\":\"a\",\"input\":\"walk\",\"output\":\"WALK\"}\n";
        assert!(matches!(read_jsonl(text.as_bytes()), Err(DatasetError::DuplicateId(id)) if id == "a"));
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = "{\"id\":\"a\",\"input\":\"jump\",\"output\":\"JUMP\"}\n{oops\n";
        assert!(matches!(read_jsonl(text.as_bytes()), Err(DatasetError::Malformed { line: 2, .. })));
        let empty = "{\"id\":\"a\",\"input\":\"\",\"output\":\"JUMP\"}\n";
        assert!(matches!(read_jsonl(empty.as_bytes()), Err(DatasetError::Malformed { line: 1, .. })));
    }

    #[test]
    fn jsonl_round_trip_is_byte_stable() {
        let text = concat!(
            "{\"id\":\"scan-00000\",\"input\":\"jump\",\"output\":\"JUMP\",\"derivation\":\"conj_single(rep_once(interp_bare(prim_jump)))\",\"meta\":{\"source\":\"scan\"}}\n",
            "{\"id\":\"x\",\"input\":\"walk left\",\"output\":\"LTURN WALK\"}\n",
        );
        let ds = read_jsonl(text.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &ds).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn predictions_default_replica() {
        let text = "{\"id\":\"a\",\"prediction\":\"JUMP JUMP\"}\n{\"id\":\"a\",\"prediction\":[\"JUMP\"],\"replica\":2}\n";
        let preds = read_predictions(text.as_bytes()).unwrap();
        assert_eq!(preds[0].replica, 0);
        assert_eq!(preds[0].prediction, vec!["JUMP", "JUMP"]);
        assert_eq!(preds[1].replica, 2);
    }

    #[test]
    fn cgps_counts_sparql_syntax() {
        let ex = Example::new("q", "Did M0 direct M1", "ASK WHERE { M0 directed M1 }");
        let out = cgps_prefix(&ex, &MappableVocabulary::cfq_default()).unwrap();
        // ASK WHERE { }
        assert_eq!(out.input_text(), "<p0> <p1> <p2> <p3> Did M0 direct M1");
        assert_eq!(out.output, ex.output);
    }

    #[test]
    fn cgps_five_non_mappable() {
        let ex = Example::new("q", "Who directed M0", "SELECT DISTINCT ?x0 WHERE { ?x0 directed M0 }");
        let vocab = MappableVocabulary::cfq_default();
        assert_eq!(vocab.non_mappable_count(&ex), 5);
        let out = cgps_prefix(&ex, &vocab).unwrap();
        assert_eq!(out.input.len(), ex.input.len() + 5);
        assert_eq!(&out.input[..5], ["<p0>", "<p1>", "<p2>", "<p3>", "<p4>"]);
    }

    #[test]
    fn cgps_scan_is_fully_mappable() {
        let ex = Example::new("s", "turn left twice and jump", "LTURN LTURN JUMP");
        let out = cgps_prefix(&ex, &MappableVocabulary::scan_default()).unwrap();
        assert_eq!(out, ex);
    }

    #[test]
    fn cgps_refuses_double_prefix() {
        let ex = Example::new("q", "Did M0 direct M1", "ASK WHERE { M0 directed M1 }");
        let vocab = MappableVocabulary::cfq_default();
        let once = cgps_prefix(&ex, &vocab).unwrap();
        assert!(matches!(cgps_prefix(&once, &vocab), Err(DatasetError::AlreadyPrefixed(_))));
    }

    #[test]
    fn cgps_global_length() {
        let a = Example::new("a", "x", "SELECT y");
        let b = Example::new("b", "x", "{ } { }");
        let out = cgps_prefix_dataset(&[a, b], &MappableVocabulary::cfq_default(), PrefixLength::Global).unwrap();
        assert_eq!(out[0].input.len(), 5);
        assert_eq!(out[1].input.len(), 5);
    }
}
