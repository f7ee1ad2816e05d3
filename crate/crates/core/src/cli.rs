//! Command-line front end: argument parsing, optional TOML configuration and
//! the workflow commands built on the library.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    examples_from, load_model, save_model, train_examples, Example, LabelSource, LinearDualModel,
    TrainConfig, TrainReport,
};
use crate::constraints::{calibrate, BpConfig, ConstraintSet};
use crate::corpus::{split_user_disjoint, Corpus, Document, DEFAULT_FRACTIONS};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalInputs, EvalReport, DEFAULT_THRESHOLD};
use crate::features::FeatureToggles;
use crate::rules::{partition_chatter, RuleSet};
use crate::synth::{generate, SynthConfig};
use crate::topics::TopicSpace;

static NO_LABELS: BTreeSet<String> = BTreeSet::new();

#[derive(Debug, Parser)]
#[command(name = "topicfuse", version, about = "Topic classification with constraint-aware calibration")]
pub struct Cli {
    /// TOML file with `[train]` and `[bp]` tables plus `threshold` and
    /// `threads`; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a corpus into rule-labelled topical posts and chatter.
    WeakLabel(WeakLabelArgs),
    /// Author-disjoint train/validation/test split.
    Split(SplitArgs),
    /// Train (or fine-tune with --init) a model.
    Train(TrainArgs),
    /// Write combined and calibrated probabilities per document.
    Predict(PredictArgs),
    /// Score predictions against gold labels and chatter.
    Evaluate(EvaluateArgs),
    /// Write a synthetic corpus with topics, rules and constraints.
    Synth(SynthArgs),
    /// Run the seven-step feature ablation ladder.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
pub struct WeakLabelArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub topics: PathBuf,
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long)]
    pub topical_out: PathBuf,
    #[arg(long)]
    pub chatter_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Writes `<prefix>.train.jsonl`, `<prefix>.valid.jsonl`, `<prefix>.test.jsonl`.
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Default)]
pub struct TrainFlags {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub max_class_weight: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub no_links: bool,
    #[arg(long)]
    pub no_media: bool,
    #[arg(long)]
    pub no_entities: bool,
    #[arg(long)]
    pub no_author: bool,
}

impl TrainFlags {
    fn resolve(&self, base: &TrainConfig) -> TrainConfig {
        let mut c = base.clone();
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = self.max_class_weight {
            c.max_class_weight = v;
        }
        if let Some(v) = self.l2 {
            c.l2 = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.toggles.links &= !self.no_links;
        c.toggles.media &= !self.no_media;
        c.toggles.entities &= !self.no_entities;
        c.toggles.author &= !self.no_author;
        c
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub topics: PathBuf,
    /// Label source: `weak` or `gold`.
    #[arg(long, default_value = "weak")]
    pub labels: LabelSource,
    /// Chatter corpus used as all-negative examples.
    #[arg(long)]
    pub chatter: Option<PathBuf>,
    /// Model to continue training from.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub flags: TrainFlags,
}

#[derive(Debug, Args, Default)]
pub struct BpFlags {
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(long)]
    pub exact_limit: Option<usize>,
}

impl BpFlags {
    fn resolve(&self, base: &BpConfig) -> BpConfig {
        let mut c = base.clone();
        if let Some(v) = self.max_iters {
            c.max_iters = v;
        }
        if let Some(v) = self.tolerance {
            c.tolerance = v;
        }
        if let Some(v) = self.damping {
            c.damping = v;
        }
        if let Some(v) = self.exact_limit {
            c.exact_component_limit = v;
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    /// Copy combined probabilities to the calibrated field.
    #[arg(long)]
    pub no_constraints: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub bp: BpFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PredictionField {
    Combined,
    Calibrated,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub topics: PathBuf,
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Corpus with gold labels for the documents in `--predictions`; an
    /// empty gold set marks chatter.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Predictions on chatter documents.
    #[arg(long)]
    pub chatter_predictions: Option<PathBuf>,
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum, default_value = "calibrated")]
    pub field: PredictionField,
    /// Report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-topic AP as TSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub documents: usize,
    #[arg(long, default_value_t = 100)]
    pub authors: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub topics: PathBuf,
    /// Weak-labelled corpus for the pretraining steps.
    #[arg(long)]
    pub weak: PathBuf,
    /// Rule chatter used as negatives during pretraining.
    #[arg(long)]
    pub weak_chatter: Option<PathBuf>,
    /// Gold-labelled training corpus.
    #[arg(long)]
    pub train: PathBuf,
    /// Gold-labelled evaluation corpus.
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub constraints: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Per-step summary as TSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub flags: TrainFlags,
    #[command(flatten)]
    pub bp: BpFlags,
}

/// Contents of the `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub train: TrainConfig,
    pub bp: BpConfig,
    pub threshold: Option<f64>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// One line of `predict` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub combined: Vec<f64>,
    pub calibrated: Vec<f64>,
    pub converged: bool,
}

impl PredictionRecord {
    pub fn field(&self, field: PredictionField) -> &[f64] {
        match field {
            PredictionField::Combined => &self.combined,
            PredictionField::Calibrated => &self.calibrated,
        }
    }
}

pub fn predictions_to_jsonl(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path.display().to_string(), i + 1, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Combined and calibrated probabilities for each document, in order.
/// `threads` bounds the worker pool; `None` uses the global pool.
pub fn predict_documents(
    model: &LinearDualModel<f64>,
    documents: &[Document],
    constraints: Option<&ConstraintSet>,
    bp: &BpConfig,
    threads: Option<usize>,
) -> Result<Vec<PredictionRecord>> {
    bp.validate()?;
    let one = |doc: &Document| -> Result<PredictionRecord> {
        let combined = model.predict_probabilities(doc);
        if combined.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("prediction for {:?}", doc.id)));
        }
        let (calibrated, converged) = match constraints {
            Some(c) => {
                let cal = calibrate(&combined, c, bp)?;
                (cal.probs, cal.converged)
            }
            None => (combined.clone(), true),
        };
        Ok(PredictionRecord {
            id: doc.id.clone(),
            combined,
            calibrated,
            converged,
        })
    };
    let run = || documents.par_iter().map(one).collect::<Result<Vec<_>>>();
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Evaluates `predictions` (aligned with `documents`) against gold labels.
/// Documents with an empty gold set count as chatter, as do the entries of
/// `extra_chatter`. Fails when `documents` is non-empty but no topic has a
/// positive.
pub fn evaluate_documents(
    space: &TopicSpace,
    documents: &[&Document],
    predictions: &[&[f64]],
    extra_chatter: &[Vec<f64>],
    constraints: Option<&ConstraintSet>,
    threshold: f64,
) -> Result<EvalReport<f64>> {
    if documents.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            expected: documents.len(),
            actual: predictions.len(),
        });
    }
    let mut topical = Vec::new();
    let mut gold = Vec::new();
    let mut chatter = Vec::new();
    for (doc, p) in documents.iter().zip(predictions) {
        let labels = doc
            .gold_labels
            .as_ref()
            .ok_or_else(|| Error::MissingLabels(doc.id.clone()))?;
        if labels.is_empty() {
            chatter.push(p.to_vec());
        } else {
            gold.push(space.encode(labels)?);
            topical.push(p.to_vec());
        }
    }
    if !documents.is_empty() && topical.is_empty() {
        return Err(Error::NoEvaluableTopic);
    }
    chatter.extend(extra_chatter.iter().cloned());
    evaluate(EvalInputs {
        space,
        predictions: &topical,
        gold: &gold,
        chatter_predictions: &chatter,
        constraints,
        threshold,
    })
}

/// Trains on `corpus` labels from `source`, with `chatter` documents as
/// all-negative examples.
pub fn train_with_chatter(
    corpus: &Corpus,
    source: LabelSource,
    chatter: Option<&Corpus>,
    space: &TopicSpace,
    config: &TrainConfig,
    init: Option<LinearDualModel<f64>>,
) -> Result<(LinearDualModel<f64>, TrainReport<f64>)> {
    let mut examples = examples_from(corpus, source)?;
    if let Some(chatter) = chatter {
        examples.extend(chatter.iter().map(|doc| Example {
            doc,
            labels: &NO_LABELS,
        }));
    }
    train_examples(&examples, space, config, init)
}

/// One step of the ablation ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderStep {
    pub name: &'static str,
    pub toggles: FeatureToggles,
    pub pretrain: bool,
    pub constraints: bool,
}

/// text, +media, +pretraining, +links, +author, +entities, +constraints.
pub fn ablation_ladder() -> [LadderStep; 7] {
    let mut t = FeatureToggles::text_only();
    let mut steps = Vec::with_capacity(7);
    let mut push = |name, t: FeatureToggles, pretrain, constraints| {
        steps.push(LadderStep {
            name,
            toggles: t,
            pretrain,
            constraints,
        })
    };
    push("text", t, false, false);
    t.media = true;
    push("+media", t, false, false);
    push("+pretraining", t, true, false);
    t.links = true;
    push("+links", t, true, false);
    t.author = true;
    push("+author", t, true, false);
    t.entities = true;
    push("+entities", t, true, false);
    push("+constraints", t, true, true);
    steps.try_into().expect("seven steps")
}

pub struct AblationInputs<'a> {
    pub space: &'a TopicSpace,
    pub weak: &'a Corpus,
    pub weak_chatter: Option<&'a Corpus>,
    pub train: &'a Corpus,
    pub test: &'a Corpus,
    pub constraints: &'a ConstraintSet,
    pub config: TrainConfig,
    pub bp: BpConfig,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct AblationRow {
    pub step: LadderStep,
    pub report: EvalReport<f64>,
}

pub fn run_ablation(inputs: &AblationInputs<'_>) -> Result<Vec<AblationRow>> {
    let docs: Vec<&Document> = inputs.test.iter().collect();
    let mut rows = Vec::new();
    for step in ablation_ladder() {
        let config = TrainConfig {
            toggles: step.toggles,
            ..inputs.config.clone()
        };
        let init = if step.pretrain {
            let (m, _) = train_with_chatter(
                inputs.weak,
                LabelSource::Weak,
                inputs.weak_chatter,
                inputs.space,
                &config,
                None,
            )?;
            Some(m)
        } else {
            None
        };
        let (model, _) = train_with_chatter(
            inputs.train,
            LabelSource::Gold,
            None,
            inputs.space,
            &config,
            init,
        )?;
        let constraints = step.constraints.then_some(inputs.constraints);
        let preds = predict_documents(&model, &inputs.test.documents, constraints, &inputs.bp, None)?;
        let scores: Vec<&[f64]> = preds.iter().map(|r| r.calibrated.as_slice()).collect();
        let report = evaluate_documents(
            inputs.space,
            &docs,
            &scores,
            &[],
            Some(inputs.constraints),
            inputs.threshold,
        )?;
        rows.push(AblationRow { step, report });
    }
    Ok(rows)
}

fn percent(report: &EvalReport<f64>) -> String {
    report
        .median_aps_percent
        .map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"))
}

fn cmd_weak_label(a: &WeakLabelArgs) -> Result<()> {
    let space = TopicSpace::load(&a.topics)?;
    let rules = RuleSet::load(&a.rules, &space)?;
    let corpus = Corpus::load(&a.corpus)?;
    let (topical, chatter) = partition_chatter(&corpus, &rules);
    topical.save(&a.topical_out)?;
    chatter.save(&a.chatter_out)?;
    println!("topical: {}\nchatter: {}", topical.len(), chatter.len());
    Ok(())
}

fn cmd_split(a: &SplitArgs) -> Result<()> {
    let fractions = match a.fractions.as_deref() {
        Some(&[train, valid, test]) => [train, valid, test],
        Some(other) => {
            return Err(Error::InvalidFractions(format!(
                "expected three comma-separated values, got {}",
                other.len()
            )))
        }
        None => DEFAULT_FRACTIONS,
    };
    let corpus = Corpus::load(&a.corpus)?;
    let split = split_user_disjoint(&corpus, fractions, a.seed)?;
    for (name, part) in ["train", "valid", "test"].iter().zip(split.parts()) {
        let mut path = a.out_prefix.clone().into_os_string();
        path.push(format!(".{name}.jsonl"));
        part.save(PathBuf::from(path))?;
        println!("{name}: {}", part.len());
    }
    Ok(())
}

fn cmd_train(a: &TrainArgs, file: &FileConfig) -> Result<()> {
    let config = a.flags.resolve(&file.train);
    config.validate()?;
    let space = TopicSpace::load(&a.topics)?;
    let corpus = Corpus::load(&a.corpus)?;
    let chatter = a.chatter.as_deref().map(Corpus::load).transpose()?;
    let init = a.init.as_deref().map(load_model::<f64>).transpose()?;
    let (model, report) =
        train_with_chatter(&corpus, a.labels, chatter.as_ref(), &space, &config, init)?;
    for (i, loss) in report.epoch_losses.iter().enumerate() {
        eprintln!("epoch {}: loss {loss:.6}", i + 1);
    }
    save_model(&model, &a.out)
}

fn cmd_predict(a: &PredictArgs, file: &FileConfig) -> Result<()> {
    let bp = a.bp.resolve(&file.bp);
    let model = load_model::<f64>(&a.model)?;
    let constraints = match (&a.constraints, a.no_constraints) {
        (Some(path), false) => Some(ConstraintSet::load(path, model.topics())?),
        _ => None,
    };
    let corpus = Corpus::load(&a.corpus)?;
    let threads = a.threads.or(file.threads);
    let records = predict_documents(&model, &corpus.documents, constraints.as_ref(), &bp, threads)?;
    let unconverged = records.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!("warning: belief propagation did not converge for {unconverged} documents");
    }
    write_file(&a.out, predictions_to_jsonl(&records).as_bytes())
}

fn cmd_evaluate(a: &EvaluateArgs, file: &FileConfig) -> Result<()> {
    let threshold = a.threshold.or(file.threshold).unwrap_or(DEFAULT_THRESHOLD);
    let space = TopicSpace::load(&a.topics)?;
    let constraints = a
        .constraints
        .as_deref()
        .map(|p| ConstraintSet::load(p, &space))
        .transpose()?;
    let chatter: Vec<Vec<f64>> = match &a.chatter_predictions {
        Some(p) => load_predictions(p)?
            .iter()
            .map(|r| r.field(a.field).to_vec())
            .collect(),
        None => Vec::new(),
    };
    let (records, gold) = match (&a.predictions, &a.gold) {
        (Some(p), Some(g)) => (load_predictions(p)?, Corpus::load(g)?),
        (None, None) if a.chatter_predictions.is_some() => (Vec::new(), Corpus::default()),
        _ => {
            return Err(Error::InvalidConfig(
                "need --predictions with --gold, or --chatter-predictions".into(),
            ))
        }
    };
    let by_id: HashMap<&str, &Document> = gold.iter().map(|d| (d.id.as_str(), d)).collect();
    let docs = records
        .iter()
        .map(|r| {
            by_id
                .get(r.id.as_str())
                .copied()
                .ok_or_else(|| Error::MissingLabels(r.id.clone()))
        })
        .collect::<Result<Vec<&Document>>>()?;
    let preds: Vec<&[f64]> = records.iter().map(|r| r.field(a.field)).collect();
    let report = evaluate_documents(
        &space,
        &docs,
        &preds,
        &chatter,
        constraints.as_ref(),
        threshold,
    )?;
    println!("median APS: {}", percent(&report));
    println!("chatter above {threshold}: {}", report.chatter_count);
    println!(
        "violations: {} inclusion, {} exclusion",
        report.violations.inclusion, report.violations.exclusion
    );
    if let Some(p) = &a.out {
        write_file(p, report.to_json().as_bytes())?;
    }
    if let Some(p) = &a.table {
        write_file(p, report.to_table().as_bytes())?;
    }
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let data = generate(&SynthConfig {
        documents: a.documents,
        authors: a.authors,
        seed: a.seed,
        ..Default::default()
    })?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    write_file(&a.out_dir.join("topics.txt"), data.space.to_file_string().as_bytes())?;
    write_file(&a.out_dir.join("rules.txt"), data.rules.as_bytes())?;
    write_file(&a.out_dir.join("constraints.txt"), data.constraints.as_bytes())?;
    data.corpus.save(a.out_dir.join("corpus.jsonl"))?;
    println!("{} documents written to {}", data.corpus.len(), a.out_dir.display());
    Ok(())
}

fn cmd_ablate(a: &AblateArgs, file: &FileConfig) -> Result<()> {
    let config = a.flags.resolve(&file.train);
    config.validate()?;
    let space = TopicSpace::load(&a.topics)?;
    let inputs_owned = (
        Corpus::load(&a.weak)?,
        a.weak_chatter.as_deref().map(Corpus::load).transpose()?,
        Corpus::load(&a.train)?,
        Corpus::load(&a.test)?,
        ConstraintSet::load(&a.constraints, &space)?,
    );
    let rows = run_ablation(&AblationInputs {
        space: &space,
        weak: &inputs_owned.0,
        weak_chatter: inputs_owned.1.as_ref(),
        train: &inputs_owned.2,
        test: &inputs_owned.3,
        constraints: &inputs_owned.4,
        config,
        bp: a.bp.resolve(&file.bp),
        threshold: a.threshold.or(file.threshold).unwrap_or(DEFAULT_THRESHOLD),
    })?;
    let mut table = String::from("step\tmedian_aps\tchatter\tinclusion_violations\texclusion_violations\n");
    for r in &rows {
        table.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.step.name,
            percent(&r.report),
            r.report.chatter_count,
            r.report.violations.inclusion,
            r.report.violations.exclusion
        ));
    }
    print!("{table}");
    if let Some(p) = &a.out {
        write_file(p, table.as_bytes())?;
    }
    Ok(())
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::WeakLabel(a) => cmd_weak_label(a),
        Command::Split(a) => cmd_split(a),
        Command::Train(a) => cmd_train(a, &file),
        Command::Predict(a) => cmd_predict(a, &file),
        Command::Evaluate(a) => cmd_evaluate(a, &file),
        Command::Synth(a) => cmd_synth(a),
        Command::Ablate(a) => cmd_ablate(a, &file),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
