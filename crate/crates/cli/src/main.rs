mod manifest;

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use compgen_core::dataset::{self, Format, MappableVocabulary, PrefixLength};
use compgen_core::dbca::{self, CompoundConfig, McdConfig};
use compgen_core::eval::{self, CurvePoint, EvalReport, LengthAxis, ScoreOptions, VarianceKind};
use compgen_core::scan;
use compgen_core::sparql::{self, IrLevel};
use compgen_core::splits::{self, SplitResult};
use compgen_core::{Example, Parallelism};

use manifest::Manifest;

/// Dataset generation, split construction and scoring for compositional
/// generalization experiments.
#[derive(Debug, Parser)]
#[command(name = "compgen", version)]
struct Cli {
    /// Seed for every random choice made by the run.
    #[arg(long, global = true, env = "COMPGEN_SEED", default_value_t = 0)]
    seed: u64,

    /// Maximum number of worker threads. 1 runs everything sequentially.
    #[arg(long, global = true, env = "COMPGEN_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SCAN commands and their action sequences.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Train/test splits.
    #[command(subcommand)]
    Split(SplitCmd),
    /// Atom and compound divergence.
    #[command(subcommand)]
    Dbca(DbcaCmd),
    /// Grouped SPARQL representations.
    #[command(subcommand)]
    Ir(IrCmd),
    /// Input preprocessing.
    #[command(subcommand)]
    Prep(PrepCmd),
    /// Scoring and reports.
    #[command(subcommand)]
    Eval(EvalCmd),
}

#[derive(Debug, Subcommand)]
enum ScanCmd {
    /// Writes every command of the grammar with its actions and derivation.
    Generate(GenerateArgs),
    /// Prints the action sequence of each command given, or of each stdin line.
    Interpret(InterpretArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenerateArgs {
    #[arg(long, env = "COMPGEN_OUT")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct InterpretArgs {
    commands: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
struct DataArgs {
    /// Dataset file (.jsonl or .tsv).
    #[arg(long, env = "COMPGEN_DATA")]
    data: PathBuf,
    /// Where to write the split file.
    #[arg(long, env = "COMPGEN_OUT")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum SplitCmd {
    Random {
        #[command(flatten)]
        io: DataArgs,
        #[arg(long, default_value_t = 0.8)]
        train_fraction: f64,
    },
    /// Holds out a primitive: jump, walk, run, look, turn_left or turn_right.
    Primitive {
        #[command(flatten)]
        io: DataArgs,
        #[arg(long)]
        primitive: String,
    },
    /// Holds out every command containing a phrase.
    Subcommand {
        #[command(flatten)]
        io: DataArgs,
        #[arg(long)]
        phrase: String,
    },
    /// Holds out a `$Primitive` template such as "$Primitive around right".
    Template {
        #[command(flatten)]
        io: DataArgs,
        #[arg(long)]
        template: String,
    },
    /// Short outputs in train, long outputs in test.
    Length {
        #[command(flatten)]
        io: DataArgs,
        #[arg(long, default_value_t = splits::DEFAULT_LENGTH_THRESHOLD)]
        max_train_output_length: usize,
    },
    /// Maximum compound divergence split.
    Mcd(McdArgs),
}

#[derive(Debug, Args, Serialize)]
struct McdArgs {
    #[command(flatten)]
    io: DataArgs,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    target: f64,
    #[arg(long, default_value_t = 0.02)]
    max_atom_divergence: f64,
    /// Stop after this many proposals without improvement.
    #[arg(long, default_value_t = 20_000)]
    iterations: usize,
    #[arg(long)]
    max_proposals: Option<usize>,
    /// Extra targets; each writes `<out stem>-t<target>.json` as well.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
}

#[derive(Debug, Subcommand)]
enum DbcaCmd {
    /// Measures atom and compound divergence of a split.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeArgs {
    #[arg(long, env = "COMPGEN_DATA")]
    data: PathBuf,
    #[arg(long)]
    split: PathBuf,
    #[arg(long, default_value_t = 2)]
    compound_depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum IrCmd {
    /// SPARQL to grouped form, one query per line.
    Encode(IrArgs),
    /// Grouped form back to SPARQL, one query per line.
    Decode(IrArgs),
}

#[derive(Debug, Args, Serialize)]
struct IrArgs {
    #[arg(long, env = "COMPGEN_IR_LEVEL")]
    level: IrLevel,
    /// Input file; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum PrepCmd {
    /// Prepends placeholder tokens for output tokens the input cannot explain.
    CgpsPrefix(PrefixArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum VocabDefault {
    Scan,
    Cfq,
}

#[derive(Debug, Args, Serialize)]
struct PrefixArgs {
    #[command(flatten)]
    io: DataArgs,
    /// Built-in mappable vocabulary.
    #[arg(long, value_enum, default_value_t = VocabDefault::Scan)]
    default: VocabDefault,
    /// JSON vocabulary file; replaces the built-in one.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Pad every input to the dataset-wide maximum prefix length.
    #[arg(long)]
    global: bool,
}

#[derive(Debug, Subcommand)]
enum EvalCmd {
    /// Exact-match accuracy of a prediction file.
    Score(ScoreArgs),
    /// Markdown results table from report files.
    Report(ReportArgs),
    /// Accuracy by input or output length.
    LengthBreakdown(BreakdownArgs),
    /// Accuracy against compound divergence, as CSV.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Variance {
    Stdev,
    Ci95,
    Bootstrap,
}

impl From<Variance> for VarianceKind {
    fn from(v: Variance) -> Self {
        match v {
            Variance::Stdev => VarianceKind::Stdev,
            Variance::Ci95 => VarianceKind::Ci95,
            Variance::Bootstrap => VarianceKind::Bootstrap,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct MatchArgs {
    /// Accept the OOV token where the gold has a brace.
    #[arg(long)]
    relax_braces: bool,
    #[arg(long, default_value = eval::DEFAULT_OOV_TOKEN)]
    oov_token: String,
    /// Compare SPARQL as clause sets.
    #[arg(long)]
    clause_set: bool,
    /// Predictions are in this grouped representation.
    #[arg(long, env = "COMPGEN_IR_LEVEL")]
    ir_level: Option<IrLevel>,
}

impl MatchArgs {
    fn options(&self, parallelism: Parallelism) -> ScoreOptions {
        ScoreOptions {
            relax_braces: self.relax_braces,
            oov_token: self.oov_token.clone(),
            clause_set: self.clause_set,
            ir_level: self.ir_level,
            parallelism,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct ScoreArgs {
    /// Gold dataset.
    #[arg(long, env = "COMPGEN_DATA")]
    gold: PathBuf,
    /// Predictions, JSONL with id, prediction and optional replica.
    #[arg(long)]
    pred: PathBuf,
    /// Restrict the gold set to the test side of this split.
    #[arg(long)]
    split: Option<PathBuf>,
    #[command(flatten)]
    matching: MatchArgs,
    #[arg(long, value_enum, default_value_t = Variance::Stdev)]
    variance: Variance,
    #[arg(long, default_value = "model")]
    model: String,
    #[arg(long, default_value = "split")]
    split_name: String,
    /// Compound divergence of the split, stored for `eval curve`.
    #[arg(long)]
    divergence: Option<f64>,
    #[arg(long, env = "COMPGEN_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, env = "COMPGEN_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BreakdownArgs {
    #[arg(long, env = "COMPGEN_DATA")]
    data: PathBuf,
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = 4)]
    width: usize,
    #[arg(long, default_value = "output")]
    axis: LengthAxis,
    #[command(flatten)]
    matching: MatchArgs,
    #[arg(long, env = "COMPGEN_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CurveArgs {
    /// Report files written by `eval score --divergence`.
    #[arg(long, num_args = 1.., required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, env = "COMPGEN_OUT")]
    out: Option<PathBuf>,
}

struct Run {
    seed: u64,
    parallelism: Parallelism,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COMPGEN_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn setup_threads(threads: Option<usize>) -> Result<Parallelism> {
    match threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(1) => Ok(Parallelism::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
            #[cfg(not(feature = "parallel"))]
            log::warn!("built without parallel support; ignoring --threads {n}");
            Ok(Parallelism::Parallel)
        }
        None => Ok(Parallelism::Parallel),
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Run { seed: cli.seed, parallelism: setup_threads(cli.threads)? };
    match cli.command {
        Command::Scan(ScanCmd::Generate(a)) => scan_generate(&ctx, &a),
        Command::Scan(ScanCmd::Interpret(a)) => scan_interpret(&a),
        Command::Split(cmd) => split(&ctx, cmd),
        Command::Dbca(DbcaCmd::Analyze(a)) => dbca_analyze(&ctx, &a),
        Command::Ir(IrCmd::Encode(a)) => ir(&ctx, &a, true),
        Command::Ir(IrCmd::Decode(a)) => ir(&ctx, &a, false),
        Command::Prep(PrepCmd::CgpsPrefix(a)) => cgps_prefix(&ctx, &a),
        Command::Eval(EvalCmd::Score(a)) => eval_score(&ctx, &a),
        Command::Eval(EvalCmd::Report(a)) => eval_report(&ctx, &a),
        Command::Eval(EvalCmd::LengthBreakdown(a)) => eval_breakdown(&ctx, &a),
        Command::Eval(EvalCmd::Curve(a)) => eval_curve(&ctx, &a),
    }
}

fn load(path: &Path) -> Result<Vec<Example>> {
    dataset::load_dataset(path, Format::from_path(path)).with_context(|| format!("loading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn json_line(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn finish(m: &Manifest) -> Result<()> {
    if let Some(p) = m.write_beside_output()? {
        log::info!("manifest written to {}", p.display());
    }
    Ok(())
}

fn scan_generate(ctx: &Run, a: &GenerateArgs) -> Result<()> {
    let examples = scan::enumerate_dataset_with(ctx.parallelism);
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    dataset::save_dataset(&a.out, Format::from_path(&a.out), &examples)?;
    let mut m = Manifest::new("scan generate", ctx.seed, a)?;
    m.output(&a.out)?;
    finish(&m)?;
    eprintln!("wrote {} examples to {}", examples.len(), a.out.display());
    Ok(())
}

fn scan_interpret(a: &InterpretArgs) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut one = |line: &str| -> Result<()> {
        let actions = scan::interpret_str(line).with_context(|| format!("in {line:?}"))?;
        writeln!(out, "{actions}")?;
        Ok(())
    };
    if a.commands.is_empty() {
        for line in io::stdin().lock().lines() {
            let line = line?;
            if !line.trim().is_empty() {
                one(&line)?;
            }
        }
    } else {
        for c in &a.commands {
            one(c)?;
        }
    }
    Ok(())
}

fn write_split(ctx: &Run, command: &str, config: &impl Serialize, io: &DataArgs, split: &SplitResult) -> Result<()> {
    write_text(&io.out, &(split.to_json() + "\n"))?;
    let mut m = Manifest::new(command, ctx.seed, config)?;
    m.input(&io.data)?;
    m.output(&io.out)?;
    finish(&m)?;
    let s = &split.summary;
    eprintln!("train {} / test {} -> {}", s.train_size, s.test_size, io.out.display());
    Ok(())
}

#[derive(Serialize)]
struct SplitConfig<'a, T: Serialize> {
    #[serde(flatten)]
    io: &'a DataArgs,
    #[serde(flatten)]
    params: T,
}

fn split(ctx: &Run, cmd: SplitCmd) -> Result<()> {
    match cmd {
        SplitCmd::Random { io, train_fraction } => {
            let data = load(&io.data)?;
            let s = splits::build_random_split(&data, ctx.seed, train_fraction)?;
            let cfg = SplitConfig { io: &io, params: serde_json::json!({ "train_fraction": train_fraction }) };
            write_split(ctx, "split random", &cfg, &io, &s)
        }
        SplitCmd::Primitive { io, primitive } => {
            let data = load(&io.data)?;
            let s = splits::build_primitive_holdout(&data, &primitive)?;
            let cfg = SplitConfig { io: &io, params: serde_json::json!({ "primitive": primitive }) };
            write_split(ctx, "split primitive", &cfg, &io, &s)
        }
        SplitCmd::Subcommand { io, phrase } => {
            let data = load(&io.data)?;
            let s = splits::build_subcommand_holdout(&data, &phrase)?;
            let cfg = SplitConfig { io: &io, params: serde_json::json!({ "phrase": phrase }) };
            write_split(ctx, "split subcommand", &cfg, &io, &s)
        }
        SplitCmd::Template { io, template } => {
            let data = load(&io.data)?;
            let s = splits::build_template_holdout(&data, &template)?;
            let cfg = SplitConfig { io: &io, params: serde_json::json!({ "template": template }) };
            write_split(ctx, "split template", &cfg, &io, &s)
        }
        SplitCmd::Length { io, max_train_output_length } => {
            let data = load(&io.data)?;
            let s = splits::build_length_split(&data, max_train_output_length)?;
            let cfg =
                SplitConfig { io: &io, params: serde_json::json!({ "max_train_output_length": max_train_output_length }) };
            write_split(ctx, "split length", &cfg, &io, &s)
        }
        SplitCmd::Mcd(a) => split_mcd(ctx, &a),
    }
}

fn sweep_path(out: &Path, target: f64) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "json".into());
    out.with_file_name(format!("{stem}-t{target}.{ext}"))
}

fn split_mcd(ctx: &Run, a: &McdArgs) -> Result<()> {
    let data = load(&a.io.data)?;
    let base = McdConfig {
        seed: ctx.seed,
        train_fraction: a.train_fraction,
        target_compound_divergence: a.target,
        max_atom_divergence: a.max_atom_divergence,
        iterations: a.iterations,
        max_proposals: a.max_proposals,
        parallelism: ctx.parallelism,
        ..McdConfig::default()
    };
    let mut targets = vec![a.target];
    targets.extend(a.sweep.iter().copied());
    let outcomes = dbca::divergence_sweep(&data, &targets, &base)?;
    let mut m = Manifest::new("split mcd", ctx.seed, a)?;
    m.input(&a.io.data)?;
    let mut reports = Vec::new();
    for (i, (target, outcome)) in targets.iter().zip(&outcomes).enumerate() {
        let path = if i == 0 { a.io.out.clone() } else { sweep_path(&a.io.out, *target) };
        write_text(&path, &(outcome.split.to_json() + "\n"))?;
        m.output(&path)?;
        let r = &outcome.report;
        eprintln!(
            "target {target}: atom {:.4}, compound {:.4}, train {} / test {} -> {}",
            r.atom_divergence,
            r.compound_divergence,
            r.train_size,
            r.test_size,
            path.display()
        );
        reports.push(serde_json::json!({ "target": target, "report": r, "stats": {
            "proposals": outcome.stats.proposals,
            "accepted": outcome.stats.accepted,
            "polish_sweeps": outcome.stats.polish_sweeps,
        }}));
    }
    let report_path = a.io.out.with_extension("report.json");
    write_text(&report_path, &json_line(&reports)?)?;
    m.output(&report_path)?;
    finish(&m)
}

fn dbca_analyze(ctx: &Run, a: &AnalyzeArgs) -> Result<()> {
    let data = load(&a.data)?;
    let text = fs::read_to_string(&a.split).with_context(|| format!("reading {}", a.split.display()))?;
    let split = SplitResult::from_json(&text, &data)?;
    let report = dbca::measure_split(
        &data,
        &split,
        CompoundConfig { max_depth: a.compound_depth },
        (dbca::ATOM_ALPHA, dbca::COMPOUND_ALPHA),
    )?;
    let body = json_line(&report)?;
    match &a.out {
        Some(out) => {
            write_text(out, &body)?;
            let mut m = Manifest::new("dbca analyze", ctx.seed, a)?;
            m.input(&a.data)?;
            m.input(&a.split)?;
            m.output(out)?;
            finish(&m)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn read_lines(input: Option<&Path>) -> Result<Vec<String>> {
    let lines: Vec<String> = match input {
        Some(p) => fs::read_to_string(p)
            .with_context(|| format!("reading {}", p.display()))?
            .lines()
            .map(str::to_string)
            .collect(),
        None => io::stdin().lock().lines().collect::<io::Result<_>>()?,
    };
    Ok(lines.into_iter().filter(|l| !l.trim().is_empty()).collect())
}

fn ir(ctx: &Run, a: &IrArgs, encode: bool) -> Result<()> {
    let mut out = String::new();
    for (n, line) in read_lines(a.input.as_deref())?.iter().enumerate() {
        let converted = if encode {
            let q = sparql::parse_sparql(line).with_context(|| format!("line {}", n + 1))?;
            sparql::ir_encode(&q, a.level).to_string()
        } else {
            sparql::ir_decode(line, a.level).with_context(|| format!("line {}", n + 1))?.to_string()
        };
        out.push_str(&converted);
        out.push('\n');
    }
    match &a.out {
        Some(path) => {
            write_text(path, &out)?;
            let mut m = Manifest::new(if encode { "ir encode" } else { "ir decode" }, ctx.seed, a)?;
            if let Some(input) = &a.input {
                m.input(input)?;
            }
            m.output(path)?;
            finish(&m)
        }
        None => {
            io::stdout().write_all(out.as_bytes())?;
            Ok(())
        }
    }
}

fn cgps_prefix(ctx: &Run, a: &PrefixArgs) -> Result<()> {
    let data = load(&a.io.data)?;
    let vocab = match &a.map {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<MappableVocabulary>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => match a.default {
            VocabDefault::Scan => MappableVocabulary::scan_default(),
            VocabDefault::Cfq => MappableVocabulary::cfq_default(),
        },
    };
    let length = if a.global { PrefixLength::Global } else { PrefixLength::PerExample };
    let prefixed = dataset::cgps_prefix_dataset(&data, &vocab, length)?;
    if let Some(dir) = a.io.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    dataset::save_dataset(&a.io.out, Format::from_path(&a.io.out), &prefixed)?;
    let mut m = Manifest::new("prep cgps-prefix", ctx.seed, a)?;
    m.input(&a.io.data)?;
    if let Some(p) = &a.map {
        m.input(p)?;
    }
    m.output(&a.io.out)?;
    finish(&m)
}

/// The gold examples on the test side of `split`, or all of them.
fn test_golds(data: Vec<Example>, split: Option<&Path>) -> Result<(Vec<Example>, Vec<Example>)> {
    let Some(path) = split else {
        return Ok((data, Vec::new()));
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let s = SplitResult::from_json(&text, &data)?;
    let test: HashSet<&str> = s.test.iter().map(String::as_str).collect();
    let train: HashSet<&str> = s.train.iter().map(String::as_str).collect();
    let (mut golds, mut train_ex) = (Vec::new(), Vec::new());
    for e in data {
        if test.contains(e.id.as_str()) {
            golds.push(e);
        } else if train.contains(e.id.as_str()) {
            train_ex.push(e);
        }
    }
    Ok((golds, train_ex))
}

fn eval_score(ctx: &Run, a: &ScoreArgs) -> Result<()> {
    let (golds, _) = test_golds(load(&a.gold)?, a.split.as_deref())?;
    let preds = dataset::load_predictions(&a.pred)?;
    let by_replica = eval::score_replicas(&preds, &golds, &a.matching.options(ctx.parallelism))?;
    let accuracies: Vec<f64> = by_replica.values().copied().collect();
    let mut report = EvalReport::new(&a.model, &a.split_name, accuracies, a.variance.into(), ctx.seed)?;
    if let Some(d) = a.divergence {
        if !(0.0..=1.0).contains(&d) {
            bail!("--divergence must lie in [0, 1], got {d}");
        }
        report.compound_divergence = Some(d);
    }
    eprintln!(
        "{} on {}: {:.2}% ± {:.2} ({}, n={})",
        report.model,
        report.split,
        report.mean * 100.0,
        report.variance * 100.0,
        report.variance_kind.describe(),
        report.n
    );
    let body = json_line(&report)?;
    match &a.out {
        Some(out) => {
            write_text(out, &body)?;
            let mut m = Manifest::new("eval score", ctx.seed, a)?;
            m.input(&a.gold)?;
            m.input(&a.pred)?;
            if let Some(s) = &a.split {
                m.input(s)?;
            }
            m.output(out)?;
            finish(&m)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn load_reports(paths: &[PathBuf]) -> Result<Vec<EvalReport>> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

fn emit(ctx: &Run, command: &str, config: &impl Serialize, inputs: &[&Path], out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(out) => {
            write_text(out, body)?;
            let mut m = Manifest::new(command, ctx.seed, config)?;
            for i in inputs {
                m.input(i)?;
            }
            m.output(out)?;
            finish(&m)
        }
        None => {
            io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn eval_report(ctx: &Run, a: &ReportArgs) -> Result<()> {
    let reports = load_reports(&a.reports)?;
    let table = eval::render_results_table(&reports);
    let inputs: Vec<&Path> = a.reports.iter().map(PathBuf::as_path).collect();
    emit(ctx, "eval report", a, &inputs, a.out.as_deref(), &table)
}

fn eval_breakdown(ctx: &Run, a: &BreakdownArgs) -> Result<()> {
    let (golds, train) = test_golds(load(&a.data)?, Some(&a.split))?;
    let preds = dataset::load_predictions(&a.pred)?;
    let rows = eval::length_breakdown(&preds, &golds, &train, a.width, a.axis, &a.matching.options(ctx.parallelism))?;
    for r in &rows {
        let acc = r.accuracy.map_or("-".to_string(), |x| format!("{:.1}", x * 100.0));
        let mark = if r.unseen_length { " *" } else { "" };
        eprintln!("{:>3}-{:<3} train {:>6} test {:>6} acc {acc}{mark}", r.lo, r.hi, r.train_count, r.test_count);
    }
    let inputs = [a.data.as_path(), a.split.as_path(), a.pred.as_path()];
    emit(ctx, "eval length-breakdown", a, &inputs, a.out.as_deref(), &json_line(&rows)?)
}

fn eval_curve(ctx: &Run, a: &CurveArgs) -> Result<()> {
    let reports = load_reports(&a.reports)?;
    let points: Vec<CurvePoint> = reports
        .iter()
        .zip(&a.reports)
        .map(|(r, p)| {
            let divergence = r
                .compound_divergence
                .with_context(|| format!("{} has no compound divergence", p.display()))?;
            Ok(CurvePoint { divergence, accuracy: r.mean, label: format!("{}/{}", r.model, r.split) })
        })
        .collect::<Result<_>>()?;
    let csv = eval::divergence_curve(&points)?;
    let inputs: Vec<&Path> = a.reports.iter().map(PathBuf::as_path).collect();
    emit(ctx, "eval curve", a, &inputs, a.out.as_deref(), &csv)
}
