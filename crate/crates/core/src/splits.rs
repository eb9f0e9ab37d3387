//! Traditional SCAN train/test splits and the split file format.
//!
//! Split files are JSON objects `{"spec": {...}, "train": [ids], "test": [ids]}`.
//! Released split files that use `trainIdxs`/`testIdxs` with integer
//! positions into the dataset are accepted on read.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{index_by_id, Example};
use crate::scan::{self, CommandAst, ParseError, Phrase, Primitive, Verb};

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("unknown primitive {0:?} (expected jump, walk, run, look, turn_left or turn_right)")]
    UnknownPrimitive(String),
    #[error("{phrase:?} is not generable by the SCAN grammar: {source}")]
    PhraseNotGenerable { phrase: String, source: ParseError },
    #[error("malformed template {template:?}: {reason}")]
    MalformedTemplate { template: String, reason: String },
    #[error("length threshold must be at least 1")]
    InvalidThreshold,
    #[error("split leaves the test set empty")]
    NoTest,
    #[error("split leaves the train set empty")]
    NoTrain,
    #[error("example {id:?} is not a SCAN command: {source}")]
    NotScan { id: String, source: ParseError },
    #[error("test tokens never seen in training: {0:?}")]
    Unfair(Vec<String>),
    #[error("split refers to unknown example {0:?}")]
    UnknownId(String),
    #[error("example {0:?} appears in both train and test")]
    Overlap(String),
    #[error("unrecognized split file: {0}")]
    BadFile(String),
}

fn default_alpha_atoms() -> f64 {
    crate::dbca::ATOM_ALPHA
}

fn default_alpha_compounds() -> f64 {
    crate::dbca::COMPOUND_ALPHA
}

/// How a split was produced. Serialized into every split file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitSpec {
    Random {
        seed: u64,
        train_fraction: f64,
    },
    PrimitiveHoldout {
        primitive: String,
        seed: u64,
    },
    SubcommandHoldout {
        phrase: String,
        seed: u64,
    },
    TemplateHoldout {
        template: String,
        seed: u64,
    },
    Length {
        max_train_output_length: usize,
        seed: u64,
    },
    Mcd {
        seed: u64,
        train_fraction: f64,
        target_compound_divergence: f64,
        max_atom_divergence: f64,
        iterations: usize,
        #[serde(default = "default_alpha_atoms")]
        atom_alpha: f64,
        #[serde(default = "default_alpha_compounds")]
        compound_alpha: f64,
    },
    /// A split read from a file that carried no spec.
    External {
        source: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitSummary {
    pub train_size: usize,
    pub test_size: usize,
    pub train_vocabulary: usize,
    pub test_vocabulary: usize,
    /// Input tokens that occur in test but never in train.
    pub unseen_test_tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub spec: SplitSpec,
    pub train: Vec<String>,
    pub test: Vec<String>,
    #[serde(skip)]
    pub summary: SplitSummary,
}

impl SplitResult {
    /// Builds a result from per-example train membership, in dataset order.
    pub fn from_mask(spec: SplitSpec, dataset: &[Example], in_train: &[bool]) -> Self {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (ex, &t) in dataset.iter().zip(in_train) {
            if t {
                train.push(ex.id.clone());
            } else {
                test.push(ex.id.clone());
            }
        }
        let summary = summarize(dataset, in_train);
        SplitResult { spec, train, test, summary }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("split serializes")
    }

    /// Parses a split file and resolves it against `dataset`.
    ///
    /// Besides the native format, accepts `{"trainIdxs": [..], "testIdxs": [..]}`
    /// and integer entries, which are read as positions into `dataset`.
    pub fn from_json(text: &str, dataset: &[Example]) -> Result<Self, SplitError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SplitError::BadFile(e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| SplitError::BadFile("expected a JSON object".into()))?;
        let spec = match obj.get("spec") {
            Some(s) => serde_json::from_value(s.clone()).map_err(|e| SplitError::BadFile(e.to_string()))?,
            None => SplitSpec::External { source: "released id lists".into() },
        };
        let field = |a: &str, b: &str| obj.get(a).or_else(|| obj.get(b)).cloned();
        let train = field("train", "trainIdxs").ok_or_else(|| SplitError::BadFile("missing train ids".into()))?;
        let test = field("test", "testIdxs").ok_or_else(|| SplitError::BadFile("missing test ids".into()))?;
        let train = resolve_ids(&train, dataset)?;
        let test = resolve_ids(&test, dataset)?;
        let index = index_by_id(dataset);
        let mut in_train = vec![false; dataset.len()];
        let mut member = vec![false; dataset.len()];
        for id in &train {
            let i = index[id.as_str()];
            in_train[i] = true;
            member[i] = true;
        }
        for id in &test {
            let i = index[id.as_str()];
            if in_train[i] {
                return Err(SplitError::Overlap(id.clone()));
            }
            member[i] = true;
        }
        let subset: Vec<Example> = dataset.iter().zip(&member).filter(|(_, m)| **m).map(|(e, _)| e.clone()).collect();
        let mask: Vec<bool> = in_train.iter().zip(&member).filter(|(_, m)| **m).map(|(t, _)| *t).collect();
        let summary = summarize(&subset, &mask);
        Ok(SplitResult { spec, train, test, summary })
    }

    pub fn check_partition(&self, dataset: &[Example]) -> Result<(), SplitError> {
        let known: HashSet<&str> = dataset.iter().map(|e| e.id.as_str()).collect();
        let mut seen = HashSet::new();
        for id in self.train.iter().chain(&self.test) {
            if !known.contains(id.as_str()) {
                return Err(SplitError::UnknownId(id.clone()));
            }
            if !seen.insert(id.as_str()) {
                return Err(SplitError::Overlap(id.clone()));
            }
        }
        Ok(())
    }
}

fn resolve_ids(value: &serde_json::Value, dataset: &[Example]) -> Result<Vec<String>, SplitError> {
    let items = value.as_array().ok_or_else(|| SplitError::BadFile("id list must be an array".into()))?;
    let index = index_by_id(dataset);
    items
        .iter()
        .map(|v| match v {
            serde_json::Value::String(s) if index.contains_key(s.as_str()) => Ok(s.clone()),
            serde_json::Value::String(s) => Err(SplitError::UnknownId(s.clone())),
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|i| dataset.get(i as usize))
                .map(|e| e.id.clone())
                .ok_or_else(|| SplitError::UnknownId(n.to_string())),
            other => Err(SplitError::BadFile(format!("bad id {other}"))),
        })
        .collect()
}

fn summarize(dataset: &[Example], in_train: &[bool]) -> SplitSummary {
    let mut train_vocab = BTreeSet::new();
    let mut test_vocab = BTreeSet::new();
    let mut summary = SplitSummary::default();
    for (ex, &t) in dataset.iter().zip(in_train) {
        let (vocab, size) = if t {
            (&mut train_vocab, &mut summary.train_size)
        } else {
            (&mut test_vocab, &mut summary.test_size)
        };
        *size += 1;
        vocab.extend(ex.input.iter().map(String::as_str));
    }
    summary.train_vocabulary = train_vocab.len();
    summary.test_vocabulary = test_vocab.len();
    summary.unseen_test_tokens = test_vocab.difference(&train_vocab).map(|s| s.to_string()).collect();
    summary
}

/// Uniform random partition with `round(train_fraction * n)` training examples.
pub fn build_random_split(dataset: &[Example], seed: u64, train_fraction: f64) -> Result<SplitResult, SplitError> {
    if dataset.is_empty() {
        return Err(SplitError::EmptyDataset);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SplitError::InvalidFraction(train_fraction));
    }
    let in_train = random_mask(dataset.len(), seed, train_fraction);
    Ok(SplitResult::from_mask(SplitSpec::Random { seed, train_fraction }, dataset, &in_train))
}

pub(crate) fn random_mask(n: usize, seed: u64, train_fraction: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (train_fraction * n as f64).round() as usize;
    let mut in_train = vec![false; n];
    for &i in &order[..n_train] {
        in_train[i] = true;
    }
    in_train
}

fn parse_all(dataset: &[Example]) -> Result<Vec<CommandAst>, SplitError> {
    if dataset.is_empty() {
        return Err(SplitError::EmptyDataset);
    }
    dataset
        .iter()
        .map(|ex| scan::parse_command(&ex.input).map_err(|source| SplitError::NotScan { id: ex.id.clone(), source }))
        .collect()
}

/// Token spans of every grammatical constituent of a command: the command
/// itself, each clause, and each clause's phrase.
fn constituents(ast: &CommandAst) -> Vec<Vec<&'static str>> {
    let mut out = vec![ast.tokens()];
    for clause in ast.clauses() {
        let mut c = Vec::new();
        clause.push_tokens(&mut c);
        let mut p = Vec::new();
        clause.phrase.push_tokens(&mut p);
        out.push(c);
        out.push(p);
    }
    out
}

fn contains_constituent(ast: &CommandAst, target: &[String]) -> bool {
    constituents(ast).iter().any(|c| c.len() == target.len() && c.iter().zip(target).all(|(a, b)| a == b))
}

/// Checks that `tokens` form a grammatical command or clause.
fn check_generable(tokens: &[String]) -> Result<(), ParseError> {
    match scan::parse::parse_clause(tokens) {
        Ok(_) => Ok(()),
        Err(clause_err) => scan::parse_command(tokens).map(|_| ()).map_err(|_| clause_err),
    }
}

fn finish_holdout(spec: SplitSpec, dataset: &[Example], in_train: &[bool]) -> Result<SplitResult, SplitError> {
    let result = SplitResult::from_mask(spec, dataset, in_train);
    if result.test.is_empty() {
        return Err(SplitError::NoTest);
    }
    if result.train.is_empty() {
        return Err(SplitError::NoTrain);
    }
    if !result.summary.unseen_test_tokens.is_empty() {
        return Err(SplitError::Unfair(result.summary.unseen_test_tokens));
    }
    Ok(result)
}

/// Held-out primitive for [`build_primitive_holdout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeldOutPrimitive {
    Action(Primitive),
    Turn(scan::Direction),
}

impl std::str::FromStr for HeldOutPrimitive {
    type Err = SplitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(p) = Primitive::from_word(s) {
            return Ok(HeldOutPrimitive::Action(p));
        }
        match s {
            "turn_left" | "turn-left" | "turn left" => Ok(HeldOutPrimitive::Turn(scan::Direction::Left)),
            "turn_right" | "turn-right" | "turn right" => Ok(HeldOutPrimitive::Turn(scan::Direction::Right)),
            other => Err(SplitError::UnknownPrimitive(other.to_string())),
        }
    }
}

impl HeldOutPrimitive {
    fn bare(self) -> CommandAst {
        let phrase = match self {
            HeldOutPrimitive::Action(p) => Phrase::Bare(p),
            HeldOutPrimitive::Turn(d) => Phrase::Directed(Verb::Turn, d),
        };
        CommandAst::Single(scan::Clause::new(phrase, scan::Repeat::Once))
    }

    fn occurs_in(self, ast: &CommandAst) -> bool {
        ast.clauses().any(|c| match self {
            HeldOutPrimitive::Action(p) => c.phrase.verb() == Verb::Action(p),
            HeldOutPrimitive::Turn(d) => c.phrase == Phrase::Directed(Verb::Turn, d),
        })
    }
}

/// Keeps the primitive in train only as the bare command; every composed use
/// goes to test.
pub fn build_primitive_holdout(dataset: &[Example], primitive: &str) -> Result<SplitResult, SplitError> {
    let held: HeldOutPrimitive = primitive.parse()?;
    let commands = parse_all(dataset)?;
    let bare = held.bare();
    let in_train: Vec<bool> = commands.iter().map(|c| *c == bare || !held.occurs_in(c)).collect();
    let spec = SplitSpec::PrimitiveHoldout { primitive: primitive.to_string(), seed: 0 };
    finish_holdout(spec, dataset, &in_train)
}

/// Sends every command containing `phrase` as a constituent to test.
pub fn build_subcommand_holdout(dataset: &[Example], phrase: &str) -> Result<SplitResult, SplitError> {
    let target = crate::dataset::tokenize(phrase);
    check_generable(&target)
        .map_err(|source| SplitError::PhraseNotGenerable { phrase: phrase.to_string(), source })?;
    let commands = parse_all(dataset)?;
    let in_train: Vec<bool> = commands.iter().map(|c| !contains_constituent(c, &target)).collect();
    let spec = SplitSpec::SubcommandHoldout { phrase: phrase.to_string(), seed: 0 };
    finish_holdout(spec, dataset, &in_train)
}

pub const PRIMITIVE_PLACEHOLDER: &str = "$Primitive";

/// Expands a `$Primitive` template into one phrase per primitive.
pub fn expand_template(template: &str) -> Result<Vec<Vec<String>>, SplitError> {
    let tokens = crate::dataset::tokenize(template);
    let malformed = |reason: String| SplitError::MalformedTemplate { template: template.to_string(), reason };
    let slots = tokens.iter().filter(|t| *t == PRIMITIVE_PLACEHOLDER).count();
    if slots != 1 {
        return Err(malformed(format!("expected exactly one {PRIMITIVE_PLACEHOLDER}, found {slots}")));
    }
    Primitive::ALL
        .into_iter()
        .map(|p| {
            let inst: Vec<String> = tokens
                .iter()
                .map(|t| if t == PRIMITIVE_PLACEHOLDER { p.word().to_string() } else { t.clone() })
                .collect();
            check_generable(&inst).map_err(|e| malformed(e.to_string()))?;
            Ok(inst)
        })
        .collect()
}

/// Sends every command matching `template` under any primitive binding to test.
pub fn build_template_holdout(dataset: &[Example], template: &str) -> Result<SplitResult, SplitError> {
    let instances = expand_template(template)?;
    let commands = parse_all(dataset)?;
    let in_train: Vec<bool> = commands
        .iter()
        .map(|c| !instances.iter().any(|inst| contains_constituent(c, inst)))
        .collect();
    let spec = SplitSpec::TemplateHoldout { template: template.to_string(), seed: 0 };
    finish_holdout(spec, dataset, &in_train)
}

/// Conventional action-length threshold for the SCAN length split.
pub const DEFAULT_LENGTH_THRESHOLD: usize = 22;

/// Output length at most the threshold goes to train, the rest to test.
pub fn build_length_split(dataset: &[Example], max_train_output_length: usize) -> Result<SplitResult, SplitError> {
    if dataset.is_empty() {
        return Err(SplitError::EmptyDataset);
    }
    if max_train_output_length == 0 {
        return Err(SplitError::InvalidThreshold);
    }
    let in_train: Vec<bool> = dataset.iter().map(|e| e.output.len() <= max_train_output_length).collect();
    let spec = SplitSpec::Length { max_train_output_length, seed: 0 };
    let result = SplitResult::from_mask(spec, dataset, &in_train);
    if result.test.is_empty() {
        return Err(SplitError::NoTest);
    }
    if result.train.is_empty() {
        return Err(SplitError::NoTrain);
    }
    Ok(result)
}
