//! Distribution-based compositionality assessment.
//!
//! Atoms are the grammar rules applied in an example's derivation; compounds
//! are local fragments of the derivation tree. A set of examples induces
//! normalized frequency distributions over both, and the divergence between
//! train and test distributions is one minus their Chernoff coefficient:
//!
//! ```text
//! D(P, Q) = 1 - sum_k P(k)^alpha * Q(k)^(1 - alpha)
//! ```
//!
//! with `alpha = 0.5` for atoms and `alpha = 0.1` for compounds by default.

mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Example;
use crate::par::{self, Parallelism};
use crate::scan::DerivationTrace;
use crate::splits::SplitResult;

pub use search::{build_mcd_split, divergence_sweep, McdConfig, McdOutcome, SearchStats};

pub const ATOM_ALPHA: f64 = 0.5;
pub const COMPOUND_ALPHA: f64 = 0.1;

/// Tolerance on the total mass of a frequency map passed to [`divergence`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum DbcaError {
    #[error("example {0:?} has no derivation trace")]
    MissingTrace(String),
    #[error("frequency map is not normalized (total mass {0})")]
    Unnormalized(f64),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("target compound divergence must lie in [0, 1], got {0}")]
    InvalidTarget(f64),
    #[error("no split found with atom divergence <= {bound} (best found {achieved:.6})")]
    Infeasible { bound: f64, achieved: f64 },
    #[error("need at least one train and one test example")]
    TooSmall,
    #[error(transparent)]
    Split(#[from] crate::splits::SplitError),
}

/// Multiset of atom or compound keys.
pub type Multiset = BTreeMap<String, u64>;

/// Normalized frequency distribution over keys.
pub type FrequencyMap = BTreeMap<String, f64>;

/// One atom per rule application, keyed by rule id.
pub fn extract_atoms(trace: &DerivationTrace) -> Multiset {
    let mut out = Multiset::new();
    for node in trace.nodes() {
        *out.entry(node.rule.clone()).or_default() += 1;
    }
    out
}

/// How compounds are read off a derivation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompoundConfig {
    /// Height of the largest fragment, counted in rule levels. Depth 2 gives
    /// every parent-child pair plus, for binary rules, the parent with both
    /// children.
    pub max_depth: usize,
}

impl Default for CompoundConfig {
    fn default() -> Self {
        CompoundConfig { max_depth: 2 }
    }
}

/// Every fragment rooted at `node` that is at most `depth` levels tall. Omitted
/// children render as `_`; the bare node renders as its rule id.
fn fragments(node: &DerivationTrace, depth: usize) -> Vec<String> {
    let mut out = vec![node.rule.clone()];
    if depth <= 1 || node.children.is_empty() {
        return out;
    }
    // Each child contributes "omitted" or one of its own fragments.
    let options: Vec<Vec<Option<String>>> = node
        .children
        .iter()
        .map(|c| std::iter::once(None).chain(fragments(c, depth - 1).into_iter().map(Some)).collect())
        .collect();
    let mut combos: Vec<Vec<Option<&str>>> = vec![Vec::new()];
    for opts in &options {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.as_deref());
                    p
                })
            })
            .collect();
    }
    for combo in combos {
        if combo.iter().all(Option::is_none) {
            continue;
        }
        let inner: Vec<&str> = combo.iter().map(|c| c.unwrap_or("_")).collect();
        out.push(format!("{}({})", node.rule, inner.join(",")));
    }
    out
}

/// Local fragments of the derivation tree with at least one parent-child
/// edge, one entry per occurrence.
pub fn extract_compounds(trace: &DerivationTrace, config: CompoundConfig) -> Multiset {
    let mut out = Multiset::new();
    for node in trace.nodes() {
        for frag in fragments(node, config.max_depth).into_iter().skip(1) {
            *out.entry(frag).or_default() += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomCompoundProfile {
    pub atoms: FrequencyMap,
    pub compounds: FrequencyMap,
}

pub fn normalize(counts: &Multiset) -> FrequencyMap {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return FrequencyMap::new();
    }
    counts.iter().map(|(k, &c)| (k.clone(), c as f64 / total as f64)).collect()
}

fn trace_of(ex: &Example) -> Result<&DerivationTrace, DbcaError> {
    ex.derivation.as_ref().ok_or_else(|| DbcaError::MissingTrace(ex.id.clone()))
}

/// Summed atom and compound multisets of a set of examples.
pub fn count_all<'a, I>(examples: I, config: CompoundConfig) -> Result<(Multiset, Multiset), DbcaError>
where
    I: IntoIterator<Item = &'a Example>,
{
    let mut atoms = Multiset::new();
    let mut compounds = Multiset::new();
    for ex in examples {
        let trace = trace_of(ex)?;
        for (k, c) in extract_atoms(trace) {
            *atoms.entry(k).or_default() += c;
        }
        for (k, c) in extract_compounds(trace, config) {
            *compounds.entry(k).or_default() += c;
        }
    }
    Ok((atoms, compounds))
}

pub fn profile(examples: &[Example], config: CompoundConfig) -> Result<AtomCompoundProfile, DbcaError> {
    let (atoms, compounds) = count_all(examples, config)?;
    Ok(AtomCompoundProfile { atoms: normalize(&atoms), compounds: normalize(&compounds) })
}

fn check_normalized(p: &FrequencyMap) -> Result<(), DbcaError> {
    let total: f64 = p.values().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE || p.values().any(|&w| w < 0.0) {
        return Err(DbcaError::Unnormalized(total));
    }
    Ok(())
}

pub fn chernoff_coefficient(p: &FrequencyMap, q: &FrequencyMap, alpha: f64) -> f64 {
    p.iter()
        .filter_map(|(k, &pk)| q.get(k).map(|&qk| pk.powf(alpha) * qk.powf(1.0 - alpha)))
        .sum()
}

/// One minus the Chernoff coefficient of `p` and `q`, clamped to `[0, 1]`.
pub fn divergence(p: &FrequencyMap, q: &FrequencyMap, alpha: f64) -> Result<f64, DbcaError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DbcaError::InvalidAlpha(alpha));
    }
    check_normalized(p)?;
    check_normalized(q)?;
    Ok((1.0 - chernoff_coefficient(p, q, alpha)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub atom_divergence: f64,
    pub compound_divergence: f64,
    pub atom_alpha: f64,
    pub compound_alpha: f64,
    pub train_size: usize,
    pub test_size: usize,
}

/// Measures atom and compound divergence of an existing split.
pub fn measure_split(
    dataset: &[Example],
    split: &SplitResult,
    config: CompoundConfig,
    alphas: (f64, f64),
) -> Result<DivergenceReport, DbcaError> {
    split.check_partition(dataset)?;
    let index = crate::dataset::index_by_id(dataset);
    let pick = |ids: &[String]| -> Vec<&Example> { ids.iter().map(|id| &dataset[index[id.as_str()]]).collect() };
    let train = pick(&split.train);
    let test = pick(&split.test);
    measure(&train, &test, config, alphas)
}

pub fn measure(
    train: &[&Example],
    test: &[&Example],
    config: CompoundConfig,
    (atom_alpha, compound_alpha): (f64, f64),
) -> Result<DivergenceReport, DbcaError> {
    if train.is_empty() || test.is_empty() {
        return Err(DbcaError::TooSmall);
    }
    let (train_atoms, train_compounds) = count_all(train.iter().copied(), config)?;
    let (test_atoms, test_compounds) = count_all(test.iter().copied(), config)?;
    Ok(DivergenceReport {
        atom_divergence: divergence(&normalize(&train_atoms), &normalize(&test_atoms), atom_alpha)?,
        compound_divergence: divergence(&normalize(&train_compounds), &normalize(&test_compounds), compound_alpha)?,
        atom_alpha,
        compound_alpha,
        train_size: train.len(),
        test_size: test.len(),
    })
}

/// Interned per-example atom and compound counts.
#[derive(Debug, Clone)]
pub(crate) struct Interned {
    pub atoms: Vec<Vec<(u32, f64)>>,
    pub compounds: Vec<Vec<(u32, f64)>>,
    pub n_atoms: usize,
    pub n_compounds: usize,
}

impl Interned {
    pub fn build(examples: &[Example], config: CompoundConfig, mode: Parallelism) -> Result<Self, DbcaError> {
        let per_example: Vec<Result<(Multiset, Multiset), DbcaError>> = par::map(mode, examples, |ex| {
            let trace = trace_of(ex)?;
            Ok((extract_atoms(trace), extract_compounds(trace, config)))
        });
        let mut atom_ids: BTreeMap<String, u32> = BTreeMap::new();
        let mut compound_ids: BTreeMap<String, u32> = BTreeMap::new();
        let mut atoms = Vec::with_capacity(examples.len());
        let mut compounds = Vec::with_capacity(examples.len());
        let intern = |ids: &mut BTreeMap<String, u32>, m: Multiset| -> Vec<(u32, f64)> {
            let mut v: Vec<(u32, f64)> = m
                .into_iter()
                .map(|(k, c)| {
                    let next = ids.len() as u32;
                    (*ids.entry(k).or_insert(next), c as f64)
                })
                .collect();
            v.sort_by_key(|&(k, _)| k);
            v
        };
        for r in per_example {
            let (a, c) = r?;
            atoms.push(intern(&mut atom_ids, a));
            compounds.push(intern(&mut compound_ids, c));
        }
        Ok(Interned { atoms, compounds, n_atoms: atom_ids.len(), n_compounds: compound_ids.len() })
    }
}
