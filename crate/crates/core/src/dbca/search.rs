//! Greedy swap search for splits at a target compound divergence.
//!
//! The search starts from a seeded random partition and repeatedly draws a
//! batch of candidate swaps (one train example exchanged with one test
//! example). Every candidate is scored against the current state, in
//! parallel when enabled, and the best one is applied if it improves the
//! objective. Candidates are drawn from a single seeded stream and ties are
//! broken by batch position, so the result does not depend on the thread
//! count.
//!
//! The objective is lexicographic: first the amount by which atom divergence
//! exceeds its bound, then the distance of compound divergence from the
//! target. Small instances finish with exhaustive best-improvement sweeps
//! over all pairs, which leaves them at a single-swap local optimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{measure, CompoundConfig, DbcaError, DivergenceReport, Interned, ATOM_ALPHA, COMPOUND_ALPHA};
use crate::dataset::Example;
use crate::par::{self, Parallelism};
use crate::splits::{random_mask, SplitResult, SplitSpec};

/// Improvements smaller than this are treated as noise.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct McdConfig {
    pub seed: u64,
    pub train_fraction: f64,
    pub target_compound_divergence: f64,
    pub max_atom_divergence: f64,
    /// Stop after this many consecutive proposals without improvement.
    pub iterations: usize,
    /// Hard cap on the total number of proposals.
    pub max_proposals: Option<usize>,
    /// Candidates scored per step.
    pub batch_size: usize,
    /// Run exhaustive pair sweeps when `|train| * |test|` is at most this.
    pub polish_limit: usize,
    pub atom_alpha: f64,
    pub compound_alpha: f64,
    pub compounds: CompoundConfig,
    pub parallelism: Parallelism,
}

impl Default for McdConfig {
    fn default() -> Self {
        McdConfig {
            seed: 0,
            train_fraction: 0.8,
            target_compound_divergence: 1.0,
            max_atom_divergence: 0.02,
            iterations: 20_000,
            max_proposals: None,
            batch_size: 256,
            polish_limit: 250_000,
            atom_alpha: ATOM_ALPHA,
            compound_alpha: COMPOUND_ALPHA,
            compounds: CompoundConfig::default(),
            parallelism: Parallelism::default(),
        }
    }
}

impl McdConfig {
    pub fn spec(&self) -> SplitSpec {
        SplitSpec::Mcd {
            seed: self.seed,
            train_fraction: self.train_fraction,
            target_compound_divergence: self.target_compound_divergence,
            max_atom_divergence: self.max_atom_divergence,
            iterations: self.iterations,
            atom_alpha: self.atom_alpha,
            compound_alpha: self.compound_alpha,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub proposals: usize,
    pub accepted: usize,
    pub polish_sweeps: usize,
    /// `(atom bound violation, distance to target)` after each accepted move,
    /// starting with the initial partition.
    pub objective_trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct McdOutcome {
    pub split: SplitResult,
    pub report: DivergenceReport,
    pub stats: SearchStats,
}

/// Running train/test counts over one key space.
#[derive(Debug, Clone)]
struct Channel {
    alpha: f64,
    train: Vec<f64>,
    test: Vec<f64>,
    train_total: f64,
    test_total: f64,
    /// Unnormalized coefficient: sum of train^alpha * test^(1 - alpha).
    raw: f64,
}

impl Channel {
    fn new(alpha: f64, n_keys: usize, rows: &[Vec<(u32, f64)>], in_train: &[bool]) -> Self {
        let mut ch = Channel {
            alpha,
            train: vec![0.0; n_keys],
            test: vec![0.0; n_keys],
            train_total: 0.0,
            test_total: 0.0,
            raw: 0.0,
        };
        for (row, &t) in rows.iter().zip(in_train) {
            let side = if t { &mut ch.train } else { &mut ch.test };
            for &(k, c) in row {
                side[k as usize] += c;
            }
        }
        ch.recompute();
        ch
    }

    fn term(&self, tr: f64, te: f64) -> f64 {
        if tr <= 0.0 || te <= 0.0 {
            0.0
        } else {
            tr.powf(self.alpha) * te.powf(1.0 - self.alpha)
        }
    }

    fn recompute(&mut self) {
        self.train_total = self.train.iter().sum();
        self.test_total = self.test.iter().sum();
        self.raw = self.train.iter().zip(&self.test).map(|(&a, &b)| self.term(a, b)).sum();
    }

    fn divergence_from(&self, raw: f64, train_total: f64, test_total: f64) -> f64 {
        if train_total <= 0.0 || test_total <= 0.0 {
            return 1.0;
        }
        let norm = train_total.powf(self.alpha) * test_total.powf(1.0 - self.alpha);
        (1.0 - raw / norm).clamp(0.0, 1.0)
    }

    fn divergence(&self) -> f64 {
        self.divergence_from(self.raw, self.train_total, self.test_total)
    }

    /// Divergence after moving `leaving` out of train and `joining` into it.
    fn divergence_after_swap(&self, leaving: &[(u32, f64)], joining: &[(u32, f64)]) -> f64 {
        let mut raw = self.raw;
        let mut delta_total = 0.0;
        let mut bump = |k: u32, d: f64| {
            if d != 0.0 {
                let (tr, te) = (self.train[k as usize], self.test[k as usize]);
                raw += self.term(tr + d, te - d) - self.term(tr, te);
                delta_total += d;
            }
        };
        // Both rows are sorted by key.
        let (mut i, mut j) = (0, 0);
        while i < leaving.len() || j < joining.len() {
            match (leaving.get(i), joining.get(j)) {
                (Some(&(ka, ca)), Some(&(kb, cb))) if ka == kb => {
                    bump(ka, cb - ca);
                    i += 1;
                    j += 1;
                }
                (Some(&(ka, ca)), Some(&(kb, _))) if ka < kb => {
                    bump(ka, -ca);
                    i += 1;
                }
                (Some(_), Some(&(kb, cb))) => {
                    bump(kb, cb);
                    j += 1;
                }
                (Some(&(ka, ca)), None) => {
                    bump(ka, -ca);
                    i += 1;
                }
                (None, Some(&(kb, cb))) => {
                    bump(kb, cb);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.divergence_from(raw, self.train_total + delta_total, self.test_total - delta_total)
    }

    fn apply_swap(&mut self, leaving: &[(u32, f64)], joining: &[(u32, f64)]) {
        for &(k, c) in leaving {
            self.train[k as usize] -= c;
            self.test[k as usize] += c;
        }
        for &(k, c) in joining {
            self.train[k as usize] += c;
            self.test[k as usize] -= c;
        }
        self.recompute();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct Score {
    violation: f64,
    distance: f64,
}

impl Score {
    fn improves_on(self, other: Score) -> bool {
        self.violation < other.violation - EPS
            || ((self.violation - other.violation).abs() <= EPS && self.distance < other.distance - EPS)
    }
}

struct State<'a> {
    data: &'a Interned,
    atoms: Channel,
    compounds: Channel,
    in_train: Vec<bool>,
    train_list: Vec<usize>,
    test_list: Vec<usize>,
    bound: f64,
    target: f64,
}

impl State<'_> {
    fn score(&self, atom_div: f64, compound_div: f64) -> Score {
        Score { violation: (atom_div - self.bound).max(0.0), distance: (compound_div - self.target).abs() }
    }

    fn current(&self) -> Score {
        self.score(self.atoms.divergence(), self.compounds.divergence())
    }

    fn score_swap(&self, train_pos: usize, test_pos: usize) -> Score {
        let (a, b) = (self.train_list[train_pos], self.test_list[test_pos]);
        let atom_div = self.atoms.divergence_after_swap(&self.data.atoms[a], &self.data.atoms[b]);
        let compound_div = self.compounds.divergence_after_swap(&self.data.compounds[a], &self.data.compounds[b]);
        self.score(atom_div, compound_div)
    }

    fn apply(&mut self, train_pos: usize, test_pos: usize) {
        let (a, b) = (self.train_list[train_pos], self.test_list[test_pos]);
        self.atoms.apply_swap(&self.data.atoms[a], &self.data.atoms[b]);
        self.compounds.apply_swap(&self.data.compounds[a], &self.data.compounds[b]);
        self.in_train[a] = false;
        self.in_train[b] = true;
        self.train_list[train_pos] = b;
        self.test_list[test_pos] = a;
    }
}

fn validate(examples: &[Example], config: &McdConfig) -> Result<(), DbcaError> {
    if !(0.0..=1.0).contains(&config.target_compound_divergence) {
        return Err(DbcaError::InvalidTarget(config.target_compound_divergence));
    }
    for alpha in [config.atom_alpha, config.compound_alpha] {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DbcaError::InvalidAlpha(alpha));
        }
    }
    if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
        return Err(crate::splits::SplitError::InvalidFraction(config.train_fraction).into());
    }
    if examples.is_empty() {
        return Err(crate::splits::SplitError::EmptyDataset.into());
    }
    Ok(())
}

/// Searches for a split whose atom divergence stays within
/// `max_atom_divergence` and whose compound divergence is as close as
/// possible to `target_compound_divergence` (1.0 maximizes it).
pub fn build_mcd_split(examples: &[Example], config: &McdConfig) -> Result<McdOutcome, DbcaError> {
    validate(examples, config)?;
    let data = Interned::build(examples, config.compounds, config.parallelism)?;
    let in_train = random_mask(examples.len(), config.seed, config.train_fraction);
    let train_list: Vec<usize> = (0..examples.len()).filter(|&i| in_train[i]).collect();
    let test_list: Vec<usize> = (0..examples.len()).filter(|&i| !in_train[i]).collect();
    if train_list.is_empty() || test_list.is_empty() {
        return Err(DbcaError::TooSmall);
    }
    let mut state = State {
        atoms: Channel::new(config.atom_alpha, data.n_atoms, &data.atoms, &in_train),
        compounds: Channel::new(config.compound_alpha, data.n_compounds, &data.compounds, &in_train),
        data: &data,
        in_train,
        train_list,
        test_list,
        bound: config.max_atom_divergence,
        target: config.target_compound_divergence,
    };

    let mut stats = SearchStats::default();
    let mut current = state.current();
    stats.objective_trace.push((current.violation, current.distance));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let batch = config.batch_size.max(1);
    let (n_train, n_test) = (state.train_list.len(), state.test_list.len());
    let mut stale = 0;

    while stale < config.iterations && config.max_proposals.is_none_or(|cap| stats.proposals < cap) {
        let candidates: Vec<(usize, usize)> =
            (0..batch).map(|_| (rng.gen_range(0..n_train), rng.gen_range(0..n_test))).collect();
        stats.proposals += batch;
        let best = par::argmin_by_key(config.parallelism, batch, |k| {
            let (i, j) = candidates[k];
            let s = state.score_swap(i, j);
            Some((s.violation, s.distance))
        });
        match best {
            Some((k, (violation, distance))) if Score { violation, distance }.improves_on(current) => {
                let (i, j) = candidates[k];
                state.apply(i, j);
                current = state.current();
                stats.accepted += 1;
                stats.objective_trace.push((current.violation, current.distance));
                stale = 0;
            }
            _ => stale += batch,
        }
    }

    if n_train.saturating_mul(n_test) <= config.polish_limit {
        loop {
            stats.polish_sweeps += 1;
            let best = par::argmin_by_key(config.parallelism, n_train * n_test, |k| {
                let s = state.score_swap(k / n_test, k % n_test);
                Some((s.violation, s.distance))
            });
            match best {
                Some((k, (violation, distance))) if Score { violation, distance }.improves_on(current) => {
                    state.apply(k / n_test, k % n_test);
                    current = state.current();
                    stats.accepted += 1;
                    stats.objective_trace.push((current.violation, current.distance));
                }
                _ => break,
            }
        }
    }

    let split = SplitResult::from_mask(config.spec(), examples, &state.in_train);
    let train: Vec<&Example> = (0..examples.len()).filter(|&i| state.in_train[i]).map(|i| &examples[i]).collect();
    let test: Vec<&Example> = (0..examples.len()).filter(|&i| !state.in_train[i]).map(|i| &examples[i]).collect();
    let report = measure(&train, &test, config.compounds, (config.atom_alpha, config.compound_alpha))?;
    if report.atom_divergence > config.max_atom_divergence {
        return Err(DbcaError::Infeasible { bound: config.max_atom_divergence, achieved: report.atom_divergence });
    }
    log::info!(
        "mcd search: {} proposals, {} accepted, atom divergence {:.5}, compound divergence {:.5}",
        stats.proposals,
        stats.accepted,
        report.atom_divergence,
        report.compound_divergence
    );
    Ok(McdOutcome { split, report, stats })
}

/// Runs the search once per target, for accuracy-vs-divergence curves.
pub fn divergence_sweep(examples: &[Example], targets: &[f64], base: &McdConfig) -> Result<Vec<McdOutcome>, DbcaError> {
    targets
        .iter()
        .map(|&t| build_mcd_split(examples, &McdConfig { target_compound_divergence: t, ..base.clone() }))
        .collect()
}
