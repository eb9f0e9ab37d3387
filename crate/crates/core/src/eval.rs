//! Exact-match scoring, replica aggregation and report rendering.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Example, PredictionRecord};
use crate::par::{self, Parallelism};
use crate::sparql::{self, IrLevel, SparqlQuery};

/// Placeholder a brace-less tokenizer emits for `{` and `}`.
pub const DEFAULT_OOV_TOKEN: &str = "<unk>";

/// z-value for a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

/// Columns whose mean is within this many percentage points of the best are
/// bolded.
pub const BOLD_MARGIN_POINTS: f64 = 0.5;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("prediction for unknown example {0:?}")]
    UnknownId(String),
    #[error("more than one prediction for example {id:?} in replica {replica}")]
    DuplicatePrediction { id: String, replica: usize },
    #[error("no replica accuracies to aggregate")]
    EmptyReplicas,
    #[error("gold output of {id:?} is not a valid query: {source}")]
    BadGold { id: String, source: sparql::SparqlError },
    #[error("bucket width must be at least 1")]
    InvalidBucketWidth,
    #[error("divergence {0} outside [0, 1]")]
    InvalidDivergence(f64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Token-level exact match. With `oov` set, that token in the prediction also
/// matches a gold `{` or `}` at the same position.
pub fn exact_match<P: AsRef<str>, G: AsRef<str>>(prediction: &[P], gold: &[G], oov: Option<&str>) -> bool {
    prediction.len() == gold.len()
        && prediction.iter().zip(gold).all(|(p, g)| {
            let (p, g) = (p.as_ref(), g.as_ref());
            p == g || (oov == Some(p) && (g == "{" || g == "}"))
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreOptions {
    pub relax_braces: bool,
    pub oov_token: String,
    /// Compare parsed queries as clause sets when the raw tokens differ.
    pub clause_set: bool,
    /// Predictions are in this grouped representation; they are decoded and
    /// compared to the gold query as clause sets.
    pub ir_level: Option<IrLevel>,
    pub parallelism: Parallelism,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            relax_braces: false,
            oov_token: DEFAULT_OOV_TOKEN.to_string(),
            clause_set: false,
            ir_level: None,
            parallelism: Parallelism::default(),
        }
    }
}

/// Gold output prepared once for every prediction compared to it.
struct PreparedGold {
    tokens: Vec<String>,
    query: Option<SparqlQuery>,
}

fn prepare_gold(gold: &Example, options: &ScoreOptions) -> Result<PreparedGold, EvalError> {
    if options.ir_level.is_none() && !options.clause_set {
        return Ok(PreparedGold { tokens: gold.output.clone(), query: None });
    }
    let query = sparql::parse_sparql(&gold.output_text())
        .map_err(|source| EvalError::BadGold { id: gold.id.clone(), source })?;
    let tokens = match options.ir_level {
        Some(level) => sparql::ir_encode(&query, level).to_string().split(' ').map(str::to_string).collect(),
        None => gold.output.clone(),
    };
    Ok(PreparedGold { tokens, query: Some(query) })
}

fn judge_one(prediction: &[String], gold: &PreparedGold, options: &ScoreOptions) -> bool {
    let oov = options.relax_braces.then_some(options.oov_token.as_str());
    if exact_match(prediction, &gold.tokens, oov) {
        return true;
    }
    let Some(gold_query) = &gold.query else {
        return false;
    };
    let text = prediction.join(" ");
    let decoded = match options.ir_level {
        Some(level) => sparql::ir_decode(&text, level),
        None => sparql::parse_sparql(&text),
    };
    decoded.is_ok_and(|q| q.clause_set_eq(gold_query))
}

/// Per-replica correctness of every gold example, in gold order. Missing
/// predictions count as wrong. Replica 0 is always present.
pub fn judge(
    predictions: &[PredictionRecord],
    golds: &[Example],
    options: &ScoreOptions,
) -> Result<BTreeMap<usize, Vec<bool>>, EvalError> {
    let index = crate::dataset::index_by_id(golds);
    let mut by_replica: BTreeMap<usize, Vec<Option<&PredictionRecord>>> = BTreeMap::new();
    by_replica.insert(0, vec![None; golds.len()]);
    for p in predictions {
        let &i = index.get(p.id.as_str()).ok_or_else(|| EvalError::UnknownId(p.id.clone()))?;
        let slots = by_replica.entry(p.replica).or_insert_with(|| vec![None; golds.len()]);
        if slots[i].replace(p).is_some() {
            return Err(EvalError::DuplicatePrediction { id: p.id.clone(), replica: p.replica });
        }
    }
    let prepared: Vec<PreparedGold> = par::map(options.parallelism, golds, |g| prepare_gold(g, options))
        .into_iter()
        .collect::<Result<_, _>>()?;
    Ok(by_replica
        .into_iter()
        .map(|(replica, slots)| {
            let correct = par::map_range(options.parallelism, golds.len(), |i| {
                slots[i].is_some_and(|p| judge_one(&p.prediction, &prepared[i], options))
            });
            (replica, correct)
        })
        .collect())
}

fn fraction(correct: &[bool]) -> f64 {
    if correct.is_empty() {
        return 0.0;
    }
    correct.iter().filter(|&&c| c).count() as f64 / correct.len() as f64
}

/// Accuracy of a single run. All predictions must share one replica index.
pub fn score_run(predictions: &[PredictionRecord], golds: &[Example], options: &ScoreOptions) -> Result<f64, EvalError> {
    let judged = judge(predictions, golds, options)?;
    let replica = predictions.first().map_or(0, |p| p.replica);
    Ok(fraction(&judged[&replica]))
}

/// Accuracy of every replica found in `predictions`, by replica index.
pub fn score_replicas(
    predictions: &[PredictionRecord],
    golds: &[Example],
    options: &ScoreOptions,
) -> Result<BTreeMap<usize, f64>, EvalError> {
    Ok(judge(predictions, golds, options)?.into_iter().map(|(r, c)| (r, fraction(&c))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceKind {
    /// Sample standard deviation.
    Stdev,
    /// Half-width of a normal-approximation 95% confidence interval.
    Ci95,
    /// Half-width of a 95% percentile-bootstrap interval of the mean.
    Bootstrap,
}

impl VarianceKind {
    pub fn describe(self) -> &'static str {
        match self {
            VarianceKind::Stdev => "standard deviation",
            VarianceKind::Ci95 => "95% confidence interval (normal approximation)",
            VarianceKind::Bootstrap => "95% confidence interval (percentile bootstrap)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub variance: f64,
    pub kind: VarianceKind,
    pub n: usize,
    /// Set for a single replica, where no spread can be estimated.
    pub degenerate: bool,
}

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

pub fn aggregate_replicas(accuracies: &[f64], kind: VarianceKind, seed: u64) -> Result<Aggregate, EvalError> {
    let n = accuracies.len();
    if n == 0 {
        return Err(EvalError::EmptyReplicas);
    }
    let mean = accuracies.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(Aggregate { mean, variance: 0.0, kind, n, degenerate: true });
    }
    let stdev = (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let variance = match kind {
        VarianceKind::Stdev => stdev,
        VarianceKind::Ci95 => Z_95 * stdev / (n as f64).sqrt(),
        VarianceKind::Bootstrap => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
                .map(|_| (0..n).map(|_| accuracies[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
                .collect();
            means.sort_by(f64::total_cmp);
            let at = |q: f64| means[((q * (BOOTSTRAP_RESAMPLES - 1) as f64).round()) as usize];
            (at(0.975) - at(0.025)) / 2.0
        }
    };
    Ok(Aggregate { mean, variance, kind, n, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthAxis {
    Input,
    Output,
}

impl std::str::FromStr for LengthAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "input" => Ok(LengthAxis::Input),
            "output" => Ok(LengthAxis::Output),
            other => Err(format!("unknown axis {other:?} (expected input or output)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBucket {
    /// Inclusive token-length bounds.
    pub lo: usize,
    pub hi: usize,
    pub train_count: usize,
    pub test_count: usize,
    /// Pooled over replicas; `None` when the bucket has no test examples.
    pub accuracy: Option<f64>,
    /// The whole bucket lies beyond the longest training example.
    pub unseen_length: bool,
}

fn length_of(ex: &Example, axis: LengthAxis) -> usize {
    match axis {
        LengthAxis::Input => ex.input.len(),
        LengthAxis::Output => ex.output.len(),
    }
}

/// Per-length-bucket train/test counts and test accuracy. Buckets are
/// `[1, w]`, `[w + 1, 2w]`, … and cover every observed length.
pub fn length_breakdown(
    predictions: &[PredictionRecord],
    golds: &[Example],
    train: &[Example],
    bucket_width: usize,
    axis: LengthAxis,
    options: &ScoreOptions,
) -> Result<Vec<LengthBucket>, EvalError> {
    if bucket_width == 0 {
        return Err(EvalError::InvalidBucketWidth);
    }
    let judged = judge(predictions, golds, options)?;
    let bucket = |len: usize| len.saturating_sub(1) / bucket_width;
    let lengths = golds.iter().chain(train).map(|e| length_of(e, axis));
    let (Some(first), Some(last)) = (lengths.clone().map(bucket).min(), lengths.map(bucket).max()) else {
        return Ok(Vec::new());
    };
    let max_train = train.iter().map(|e| length_of(e, axis)).max().unwrap_or(0);
    let mut rows: Vec<LengthBucket> = (first..=last)
        .map(|b| LengthBucket {
            lo: b * bucket_width + 1,
            hi: (b + 1) * bucket_width,
            train_count: 0,
            test_count: 0,
            accuracy: None,
            unseen_length: b * bucket_width + 1 > max_train,
        })
        .collect();
    let mut correct = vec![0usize; rows.len()];
    for e in train {
        rows[bucket(length_of(e, axis)) - first].train_count += 1;
    }
    for (i, g) in golds.iter().enumerate() {
        let b = bucket(length_of(g, axis)) - first;
        rows[b].test_count += 1;
        correct[b] += judged.values().filter(|c| c[i]).count();
    }
    for (row, c) in rows.iter_mut().zip(correct) {
        if row.test_count > 0 {
            row.accuracy = Some(c as f64 / (row.test_count * judged.len()) as f64);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub divergence: f64,
    pub accuracy: f64,
    pub label: String,
}

/// CSV with columns `divergence,accuracy,label`, sorted by divergence. Ties
/// keep their input order.
pub fn divergence_curve(points: &[CurvePoint]) -> Result<String, EvalError> {
    if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.divergence)) {
        return Err(EvalError::InvalidDivergence(p.divergence));
    }
    let mut sorted: Vec<&CurvePoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.divergence.total_cmp(&b.divergence));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["divergence", "accuracy", "label"])?;
    for p in sorted {
        w.serialize((p.divergence, p.accuracy, &p.label))?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Scores of one model on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub split: String,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub variance_kind: VarianceKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub length_buckets: Vec<LengthBucket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compound_divergence: Option<f64>,
}

impl EvalReport {
    pub fn new(model: &str, split: &str, accuracies: Vec<f64>, kind: VarianceKind, seed: u64) -> Result<Self, EvalError> {
        let agg = aggregate_replicas(&accuracies, kind, seed)?;
        Ok(EvalReport {
            model: model.to_string(),
            split: split.to_string(),
            accuracies,
            mean: agg.mean,
            variance: agg.variance,
            variance_kind: kind,
            n: agg.n,
            length_buckets: Vec::new(),
            compound_divergence: None,
        })
    }
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for s in items {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// Markdown table with one row per model and one column per split. Cells are
/// `mean ± variance` in percent, `-` where a model has no result, and bold
/// within [`BOLD_MARGIN_POINTS`] of the column's best mean.
pub fn render_results_table(reports: &[EvalReport]) -> String {
    let models = first_seen(reports.iter().map(|r| r.model.as_str()));
    let splits = first_seen(reports.iter().map(|r| r.split.as_str()));
    let cell: HashMap<(&str, &str), &EvalReport> =
        reports.iter().map(|r| ((r.model.as_str(), r.split.as_str()), r)).collect();
    let best: HashMap<&str, f64> = splits
        .iter()
        .map(|&s| {
            let top = reports.iter().filter(|r| r.split == s).map(|r| r.mean * 100.0).fold(f64::MIN, f64::max);
            (s, top)
        })
        .collect();

    let mut out = String::new();
    out.push_str("| Model |");
    for s in &splits {
        out.push_str(&format!(" {s} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(splits.len()));
    out.push('\n');
    for &m in &models {
        out.push_str(&format!("| {m} |"));
        for &s in &splits {
            let text = match cell.get(&(m, s)) {
                None => "-".to_string(),
                Some(r) => {
                    let mean = r.mean * 100.0;
                    let body = if r.n > 1 {
                        format!("{mean:.1} ± {:.1}", r.variance * 100.0)
                    } else {
                        format!("{mean:.1}")
                    };
                    if best[s] - mean <= BOLD_MARGIN_POINTS + 1e-9 {
                        format!("**{body}**")
                    } else {
                        body
                    }
                }
            };
            out.push_str(&format!(" {text} |"));
        }
        out.push('\n');
    }

    out.push('\n');
    let mut notes: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for &s in &splits {
        let mut kinds = first_seen(reports.iter().filter(|r| r.split == s).map(|r| r.variance_kind.describe()));
        kinds.sort();
        for k in kinds {
            notes.entry(k).or_default().push(s);
        }
    }
    for (kind, cols) in notes {
        out.push_str(&format!("Variance for {} is the {kind}.\n", cols.join(", ")));
    }
    let mut counts: Vec<String> = Vec::new();
    for r in reports {
        counts.push(format!("{}/{}: n={}", r.model, r.split, r.n));
    }
    out.push_str(&format!("Replicas: {}.\n", counts.join("; ")));
    out.push_str(&format!(
        "Bold marks results within {BOLD_MARGIN_POINTS} points of the best result in the column.\n"
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn pred(id: &str, text: &str, replica: usize) -> PredictionRecord {
        PredictionRecord { id: id.into(), prediction: toks(text), replica }
    }

    #[test]
    fn exact_match_cases() {
        let gold = toks("SELECT count(*) WHERE { ?x0 a M0 }");
        assert!(exact_match(&gold, &gold, None));
        let unk = toks("SELECT count(*) WHERE <unk> ?x0 a M0 <unk>");
        assert!(!exact_match(&unk, &gold, None));
        assert!(exact_match(&unk, &gold, Some("<unk>")));
        let wrong_place = toks("SELECT count(*) WHERE { <unk> a M0 }");
        assert!(!exact_match(&wrong_place, &gold, Some("<unk>")));
        assert!(!exact_match(&gold[..3], &gold, None));
    }

    #[test]
    fn score_run_fractions() {
        let golds: Vec<Example> = (0..4).map(|i| Example::new(format!("e{i}"), "jump", "JUMP")).collect();
        let all: Vec<_> = (0..4).map(|i| pred(&format!("e{i}"), "JUMP", 0)).collect();
        let opts = ScoreOptions::default();
        assert_eq!(score_run(&all, &golds, &opts).unwrap(), 1.0);
        let none: Vec<_> = (0..4).map(|i| pred(&format!("e{i}"), "WALK", 0)).collect();
        assert_eq!(score_run(&none, &golds, &opts).unwrap(), 0.0);
        let mut three = all.clone();
        three[2].prediction = toks("RUN");
        assert_eq!(score_run(&three, &golds, &opts).unwrap(), 0.75);
        // missing predictions count as wrong
        assert_eq!(score_run(&all[..2], &golds, &opts).unwrap(), 0.5);
    }

    #[test]
    fn score_run_errors() {
        let golds = vec![Example::new("a", "jump", "JUMP")];
        let opts = ScoreOptions::default();
        assert!(matches!(score_run(&[pred("zz", "JUMP", 0)], &golds, &opts), Err(EvalError::UnknownId(_))));
        let dup = [pred("a", "JUMP", 0), pred("a", "JUMP", 0)];
        assert!(matches!(score_run(&dup, &golds, &opts), Err(EvalError::DuplicatePrediction { .. })));
    }

    #[test]
    fn replicas_are_scored_separately() {
        let golds = vec![Example::new("a", "jump", "JUMP"), Example::new("b", "walk", "WALK")];
        let preds = [pred("a", "JUMP", 0), pred("b", "WALK", 0), pred("a", "JUMP", 1), pred("b", "RUN", 1)];
        let scores = score_replicas(&preds, &golds, &ScoreOptions::default()).unwrap();
        assert_eq!(scores, BTreeMap::from([(0, 1.0), (1, 0.5)]));
    }

    #[test]
    fn clause_set_option() {
        let golds = vec![Example::new("q", "x", "ASK WHERE { M0 r M1 . M2 r M3 }")];
        let preds = [pred("q", "ASK WHERE { M2 r M3 . M0 r M1 }", 0)];
        assert_eq!(score_run(&preds, &golds, &ScoreOptions::default()).unwrap(), 0.0);
        let opts = ScoreOptions { clause_set: true, ..ScoreOptions::default() };
        assert_eq!(score_run(&preds, &golds, &opts).unwrap(), 1.0);
    }

    #[test]
    fn aggregate_cases() {
        let flat = aggregate_replicas(&[0.5, 0.5, 0.5], VarianceKind::Ci95, 0).unwrap();
        assert_eq!((flat.mean, flat.variance), (0.5, 0.0));
        let one = aggregate_replicas(&[0.7], VarianceKind::Stdev, 0).unwrap();
        assert!(one.degenerate);
        assert_eq!(one.variance, 0.0);
        let two = aggregate_replicas(&[0.0, 1.0], VarianceKind::Stdev, 0).unwrap();
        assert_eq!(two.mean, 0.5);
        assert!((two.variance - 0.5f64.sqrt()).abs() < 1e-12);
        let ci = aggregate_replicas(&[0.0, 1.0], VarianceKind::Ci95, 0).unwrap();
        assert!((ci.variance - 1.96 * 0.5f64.sqrt() / 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(aggregate_replicas(&[], VarianceKind::Stdev, 0), Err(EvalError::EmptyReplicas)));
    }

    #[test]
    fn bootstrap_is_seeded() {
        let accs = [0.6, 0.7, 0.65, 0.8, 0.72];
        let a = aggregate_replicas(&accs, VarianceKind::Bootstrap, 3).unwrap();
        let b = aggregate_replicas(&accs, VarianceKind::Bootstrap, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.variance > 0.0 && a.variance < 0.2);
    }

    #[test]
    fn single_bucket() {
        let golds: Vec<Example> = (0..3).map(|i| Example::new(format!("t{i}"), "a b", "A B C D E")).collect();
        let train = vec![Example::new("r", "a", "A B C")];
        let preds = [pred("t0", "A B C D E", 0)];
        let rows = length_breakdown(&preds, &golds, &train, 5, LengthAxis::Output, &ScoreOptions::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].lo, rows[0].hi, rows[0].train_count, rows[0].test_count), (1, 5, 1, 3));
        assert!((rows[0].accuracy.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(!rows[0].unseen_length);
        assert!(matches!(
            length_breakdown(&preds, &golds, &train, 0, LengthAxis::Output, &ScoreOptions::default()),
            Err(EvalError::InvalidBucketWidth)
        ));
    }

    #[test]
    fn unseen_lengths_are_flagged() {
        let train = vec![Example::new("r", "a", "A A")];
        let golds = vec![Example::new("t0", "a", "A"), Example::new("t1", "a", "A A A A A A A")];
        let rows = length_breakdown(&[], &golds, &train, 3, LengthAxis::Output, &ScoreOptions::default()).unwrap();
        let flags: Vec<bool> = rows.iter().map(|r| r.unseen_length).collect();
        assert_eq!(flags, [false, true, true]);
        assert_eq!(rows[1].accuracy, None);
        assert_eq!(rows[2].accuracy, Some(0.0));
    }

    #[test]
    fn curve_csv() {
        let p = |d: f64, a: f64, l: &str| CurvePoint { divergence: d, accuracy: a, label: l.into() };
        assert_eq!(divergence_curve(&[p(0.1, 0.9, "mcd")]).unwrap(), "divergence,accuracy,label\n0.1,0.9,mcd\n");
        let csv = divergence_curve(&[p(0.5, 0.2, "b"), p(0.1, 0.9, "a"), p(0.5, 0.3, "c")]).unwrap();
        assert_eq!(csv, "divergence,accuracy,label\n0.1,0.9,a\n0.5,0.2,b\n0.5,0.3,c\n");
        assert!(divergence_curve(&[p(1.5, 0.0, "x")]).is_err());
    }

    fn report(model: &str, split: &str, accs: &[f64], kind: VarianceKind) -> EvalReport {
        EvalReport::new(model, split, accs.to_vec(), kind, 0).unwrap()
    }

    #[test]
    fn one_by_one_table() {
        let table = render_results_table(&[report("T5-small", "Simple", &[0.999], VarianceKind::Stdev)]);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "| Model | Simple |");
        assert_eq!(lines[1], "|---|---|");
        assert_eq!(lines[2], "| T5-small | **99.9** |");
    }

    #[test]
    fn table_conventions() {
        let reports = [
            report("A", "Length", &[0.10, 0.12], VarianceKind::Stdev),
            report("A", "MCD", &[0.5, 0.5, 0.5], VarianceKind::Ci95),
            report("B", "Length", &[0.104, 0.112], VarianceKind::Stdev),
            report("C", "Length", &[0.05, 0.05], VarianceKind::Stdev),
        ];
        let table = render_results_table(&reports);
        assert!(table.contains("| A | **11.0 ± 1.4** | **50.0 ± 0.0** |"), "{table}");
        assert!(table.contains("| B | **10.8 ± 0.6** | - |"), "{table}");
        assert!(table.contains("| C | 5.0 ± 0.0 | - |"), "{table}");
        assert!(table.contains("Variance for MCD is the 95% confidence interval"));
        assert!(table.contains("Variance for Length is the standard deviation"));
    }
}
