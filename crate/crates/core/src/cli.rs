//! `fusebench` command line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::annotation::{self, AnnotationStore, StoreConfig};
use crate::corpus::interchange::{load_instances, pair_instance_id, write_instances, InterchangeAlignment};
use crate::corpus::{Document, FicInstance, Origin, RawDocument, ReviewSet, Split, SystemOutput};
use crate::dataset::{
    assemble_instances, assign_splits, build_kshot_prompt, compute_statistics, decode_markup, generate_coverage_training_data,
    render_input, Corpus, DatasetError, EncodedInput, EncodingConfig, EncodingMode, PairAlignment, SplitRatios,
};
use crate::error::{Error, Result};
use crate::gateway::{HttpScorer, MockScorer, Scorer, ScorerEndpointConfig};
use crate::leaderboard::{self, parse_submission, Leaderboard};
use crate::meta_eval::{correlation_table, BootstrapConfig, CorrelationMethod, ScoreRecord, TableConfig};
use crate::metrics::{
    aligned_token_sets, cohens_kappa, evaluate_outputs, harmonic_mean, iou_agreement_with, render_results_table, CoverageMode,
    EvalConfig, FaithfulnessMode, IouAggregation,
};

#[derive(Debug, Parser)]
#[command(name = "fusebench", version, about = "Highlight-fusion benchmark workbench", arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert raw review sets with summaries into interchange documents.
    Ingest(IngestArgs),
    /// Dataset statistics per split.
    Stats(StatsArgs),
    /// Attach collected alignments to pairs, assign splits, write instances.
    BuildDataset(BuildDatasetArgs),
    /// Synthesize highlight-containment classifier training data.
    GenCoverageData(GenCoverageArgs),
    /// Render model inputs (optionally as k-shot prompts).
    Encode(EncodeArgs),
    /// Strip highlight markers from encoded inputs, recovering the spans.
    Decode(DecodeArgs),
    /// Score system outputs for faithfulness, coverage and lexical overlap.
    Evaluate(EvaluateArgs),
    /// Correlate metric scores with human scores, with bootstrap CIs.
    MetaEval(MetaEvalArgs),
    /// IoU and kappa agreement between two annotations of the same instances.
    Agreement(AgreementArgs),
    /// Run the annotation service and leaderboard API.
    Serve(ServeArgs),
    /// Score a submission and add it to the leaderboard.
    Submit(SubmitArgs),
    /// Print the leaderboard.
    Leaderboard(LeaderboardArgs),
}

#[derive(Debug, Args)]
pub struct ScorerArgs {
    /// Use an in-process scorer returning this probability for every request.
    #[arg(long, value_name = "P", conflicts_with = "scorer_url")]
    pub mock_scorer: Option<f64>,
    /// Base URL of the scoring backend.
    #[arg(long, env = "FUSEBENCH_SCORER_URL")]
    pub scorer_url: Option<String>,
    /// Coverage scoring mode.
    #[arg(long, value_enum, default_value = "trained")]
    pub mode: CoverageMode,
    #[arg(long, value_enum, default_value = "nli")]
    pub faithfulness_mode: FaithfulnessMode,
    /// Maximum concurrent backend requests.
    #[arg(long, default_value_t = 8)]
    pub max_in_flight: usize,
}

impl ScorerArgs {
    pub fn scorer(&self) -> Result<Arc<dyn Scorer>> {
        match (self.mock_scorer, &self.scorer_url) {
            (Some(p), _) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Invalid(format!("--mock-scorer {p} is not a probability")));
                }
                Ok(Arc::new(MockScorer::constant(p)))
            }
            (None, Some(url)) => {
                let mut config = ScorerEndpointConfig::new(url.clone());
                config.max_in_flight = self.max_in_flight;
                Ok(Arc::new(HttpScorer::new(config).map_err(Error::Invalid)?))
            }
            (None, None) => Err(Error::Invalid("no scorer: pass --mock-scorer or --scorer-url (or set FUSEBENCH_SCORER_URL)".into())),
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig { faithfulness_mode: self.faithfulness_mode, coverage_mode: self.mode, ..EvalConfig::default() }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// JSON array (or JSONL) of `{review_set_id, origin?, reviews, summaries}`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Split written on every pair until `build-dataset` assigns real ones.
    #[arg(long, default_value = "train")]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// `train`, `dev`, `test`, `overall` or `all`.
    #[arg(long, default_value = "all")]
    pub split: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// Interchange documents providing the pairs (their alignments are ignored).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// JSONL alignment lines `{review_set_id, summary_id, summary_sentence_index, ...}`.
    #[arg(long, conflicts_with = "annotation_dir")]
    pub alignments: Option<PathBuf>,
    /// Read alignments from an annotation service data directory instead.
    #[arg(long)]
    pub annotation_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Train, dev and test fractions.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.643, 0.099, 0.258])]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenCoverageArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Only use instances of this split.
    #[arg(long)]
    pub split: Option<Split>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// JSONL output, one encoded instance per line.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "with-highlights")]
    pub encoding: EncodingMode,
    #[arg(long)]
    pub split: Option<Split>,
    /// Also emit a prompt with this many exemplars.
    #[arg(long, requires = "exemplars")]
    pub kshot: Option<usize>,
    /// Instances used, in id order, as prompt exemplars.
    #[arg(long)]
    pub exemplars: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// JSONL written by `encode`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, visible_alias = "in")]
    pub instances: PathBuf,
    /// JSONL `{instance_id, system_id, passage}`. Without it the reference
    /// summaries are scored as system `reference`.
    #[arg(long)]
    pub outputs: Option<PathBuf>,
    #[arg(long)]
    pub split: Option<Split>,
    /// Write every ScoreReport as JSONL here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub scorer: ScorerArgs,
}

#[derive(Debug, Args)]
pub struct MetaEvalArgs {
    /// `name=path` of a JSON array of `{instance_id, system_id, value}`.
    #[arg(long = "metric", required = true, value_parser = parse_named_path)]
    pub metrics: Vec<(String, PathBuf)>,
    /// `axis=path` of human scores in the same format.
    #[arg(long = "human", required = true, value_parser = parse_named_path)]
    pub human: Vec<(String, PathBuf)>,
    #[arg(long, value_enum, default_value = "kendall-tau-b")]
    pub method: CorrelationMethod,
    #[arg(long, default_value_t = 1000)]
    pub n_boot: usize,
    #[arg(long, default_value_t = 70)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// First annotator's instances.
    #[arg(long)]
    pub a: PathBuf,
    /// Second annotator's instances, same ids.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "sentence-mean")]
    pub aggregation: IouAggregationArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum IouAggregationArg {
    SentenceMean,
    Pooled,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "FUSEBENCH_DATA_DIR", default_value = "fusebench-data")]
    pub data_dir: PathBuf,
    #[arg(long, env = "FUSEBENCH_BIND", default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Instances for the leaderboard; without them only the annotation API runs.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    /// Static annotation UI assets served under `/ui`.
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[arg(long, default_value_t = annotation::DEFAULT_CLOSED_ROUNDS)]
    pub closed_rounds: u8,
    #[command(flatten)]
    pub scorer: ScorerArgs,
}

#[derive(Debug, Args)]
pub struct SubmitArgs {
    #[arg(long)]
    pub instances: PathBuf,
    /// JSONL `{instance_id, passage}` covering every test instance.
    #[arg(long)]
    pub submission: PathBuf,
    #[arg(long)]
    pub system_id: String,
    #[arg(long, env = "FUSEBENCH_DATA_DIR", default_value = "fusebench-data")]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub replace: bool,
    #[command(flatten)]
    pub scorer: ScorerArgs,
}

#[derive(Debug, Args)]
pub struct LeaderboardArgs {
    #[arg(long, env = "FUSEBENCH_DATA_DIR", default_value = "fusebench-data")]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub json: bool,
}

fn parse_named_path(s: &str) -> std::result::Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or_else(|| format!("expected NAME=PATH, got `{s}`"))?;
    if name.is_empty() {
        return Err(format!("empty name in `{s}`"));
    }
    Ok((name.to_string(), PathBuf::from(path)))
}

/// Parses `argv` and runs the command. Returns the process exit code: 0 on
/// success, 2 for usage errors, 1 for failures (reported as one JSON line on
/// stderr).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            1
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start async runtime: {e}")))
}

/// Runs one command, writing its report to `out`.
pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(&a, out),
        Command::Stats(a) => stats(&a, out),
        Command::BuildDataset(a) => build_dataset(&a, out),
        Command::GenCoverageData(a) => gen_coverage(&a, out),
        Command::Encode(a) => encode(&a, out),
        Command::Decode(a) => decode(&a, out),
        Command::Evaluate(a) => runtime()?.block_on(evaluate(&a, out)),
        Command::MetaEval(a) => meta_eval(&a, out),
        Command::Agreement(a) => agreement(&a, out),
        Command::Serve(a) => runtime()?.block_on(serve(a)),
        Command::Submit(a) => runtime()?.block_on(submit(&a, out)),
        Command::Leaderboard(a) => show_leaderboard(&a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{}", text.trim_end()).map_err(|e| Error::io("<stdout>", e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::from(e).context(format!("{}:{}", path.display(), i + 1))))
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(&r)?);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_split(path: &Path, split: Option<Split>) -> Result<Vec<FicInstance>> {
    let mut instances = load_instances(path)?;
    if let Some(split) = split {
        instances.retain(|i| i.split == split);
    }
    Ok(instances)
}

/// Input record of `ingest`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawReviewSet {
    pub review_set_id: String,
    #[serde(default = "other_origin")]
    pub origin: Origin,
    pub reviews: Vec<RawDocument>,
    pub summaries: Vec<RawDocument>,
}

fn other_origin() -> Origin {
    Origin::Other
}

fn ingest(args: &IngestArgs, out: &mut dyn Write) -> Result<()> {
    let text = read(&args.input)?;
    let sets: Vec<RawReviewSet> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Error::from(e).context(args.input.display().to_string()))?
    } else {
        read_jsonl(&args.input)?
    };
    let mut instances = Vec::new();
    for set in sets {
        let review_set = ReviewSet {
            id: set.review_set_id.clone(),
            reviews: set.reviews.into_iter().map(Document::from).collect(),
            origin: set.origin,
        };
        for summary in set.summaries {
            let id = pair_instance_id(&set.review_set_id, &summary.id);
            instances.push(FicInstance::new(id, review_set.clone(), Document::from(summary), Vec::new(), args.split));
        }
    }
    write_instances(&args.out, &instances)?;
    emit(out, &format!("wrote {} instances to {}", instances.len(), args.out.display()))
}

fn stats(args: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    let instances = load_instances(&args.input)?;
    let mut table = compute_statistics(&instances)?;
    if args.split != "all" {
        let row = table
            .rows
            .remove(&args.split)
            .ok_or_else(|| Error::Invalid(format!("no `{}` rows (have: {:?})", args.split, table.rows.keys().collect::<Vec<_>>())))?;
        table.rows = BTreeMap::from([(args.split.clone(), row)]);
    }
    if args.json {
        emit(out, &serde_json::to_string_pretty(&table)?)
    } else {
        emit(out, &table.render_text())
    }
}

/// Line of an alignment JSONL file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignmentLine {
    pub review_set_id: String,
    pub summary_id: String,
    #[serde(flatten)]
    pub alignment: InterchangeAlignment,
}

fn build_dataset(args: &BuildDatasetArgs, out: &mut dyn Write) -> Result<()> {
    let instances = load_instances(&args.input)?;
    let corpus = Corpus::from_instances(&instances);
    let alignments: Vec<PairAlignment> = match (&args.alignments, &args.annotation_dir) {
        (Some(path), _) => read_jsonl::<AlignmentLine>(path)?
            .into_iter()
            .map(|l| PairAlignment { review_set_id: l.review_set_id, summary_id: l.summary_id, alignment: l.alignment.into() })
            .collect(),
        (None, Some(dir)) => AnnotationStore::open(dir, StoreConfig::default())?.export_alignments(),
        (None, None) => return Err(Error::Invalid("pass --alignments or --annotation-dir".into())),
    };
    let ratios = SplitRatios::new(args.ratios[0], args.ratios[1], args.ratios[2])?;
    let ids: Vec<&str> = corpus.review_sets.keys().map(String::as_str).collect();
    let plan = assign_splits(&ids, ratios, args.seed);
    let (built, warnings) = assemble_instances(&corpus, &alignments, &plan)?;
    for w in &warnings {
        tracing::warn!(instance = %w.instance_id, "{}", w.message);
        eprintln!("warning: {}: {}", w.instance_id, w.message);
    }
    write_instances(&args.out, &built)?;
    let count = |s: Split| built.iter().filter(|i| i.split == s).count();
    emit(
        out,
        &format!(
            "wrote {} instances ({} train / {} dev / {} test), {} warnings",
            built.len(),
            count(Split::Train),
            count(Split::Dev),
            count(Split::Test),
            warnings.len()
        ),
    )
}

fn gen_coverage(args: &GenCoverageArgs, out: &mut dyn Write) -> Result<()> {
    let instances = load_split(&args.input, args.split)?;
    let mut records = Vec::new();
    let mut skipped = 0;
    for inst in &instances {
        match generate_coverage_training_data(inst, args.seed) {
            Ok(data) => {
                for w in &data.warnings {
                    eprintln!("warning: {w}");
                }
                records.extend(data.samples.iter().map(|s| s.record()));
            }
            Err(e @ (DatasetError::TooFewSentences { .. } | DatasetError::NoAlignments(_))) => {
                eprintln!("warning: skipped: {e}");
                skipped += 1;
            }
            Err(e) => return Err(Error::from(e).context(inst.instance_id.clone())),
        }
    }
    write_jsonl(&args.out, &records)?;
    emit(out, &format!("wrote {} samples to {} ({skipped} instances skipped)", records.len(), args.out.display()))
}

/// Line written by `encode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedLine {
    pub instance_id: String,
    #[serde(flatten)]
    pub input: EncodedInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
}

/// Line written by `decode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedLine {
    pub instance_id: String,
    pub text: String,
    pub spans: Vec<crate::corpus::Span>,
}

fn encode(args: &EncodeArgs, out: &mut dyn Write) -> Result<()> {
    let instances = load_split(&args.input, args.split)?;
    let config = EncodingConfig::default();
    let exemplars: Vec<(EncodedInput, String)> = match &args.exemplars {
        Some(path) => load_instances(path)?
            .iter()
            .map(|i| Ok((render_input(i, args.encoding, &config)?, i.fused_text.text.clone())))
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let mut lines = Vec::with_capacity(instances.len());
    for inst in &instances {
        let input = render_input(inst, args.encoding, &config).map_err(|e| Error::from(e).context(inst.instance_id.clone()))?;
        let prompt = args.kshot.map(|k| build_kshot_prompt(&exemplars, &input, k)).transpose()?;
        lines.push(EncodedLine { instance_id: inst.instance_id.clone(), input, prompt });
    }
    write_jsonl(&args.out, &lines)?;
    emit(out, &format!("wrote {} encoded inputs to {}", lines.len(), args.out.display()))
}

fn decode(args: &DecodeArgs, out: &mut dyn Write) -> Result<()> {
    let lines: Vec<EncodedLine> = read_jsonl(&args.input)?;
    let mut decoded = Vec::with_capacity(lines.len());
    for line in lines {
        let d = decode_markup(&line.input.text, &line.input.marker_open, &line.input.marker_close)
            .map_err(|e| Error::from(e).context(line.instance_id.clone()))?;
        decoded.push(DecodedLine { instance_id: line.instance_id, text: d.text, spans: d.spans });
    }
    write_jsonl(&args.out, &decoded)?;
    emit(out, &format!("wrote {} decoded inputs to {}", decoded.len(), args.out.display()))
}

async fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let instances = load_split(&args.instances, args.split)?;
    let outputs: Vec<SystemOutput> = match &args.outputs {
        Some(path) => read_jsonl(path)?,
        None => instances.iter().map(|i| SystemOutput::new(i.instance_id.clone(), "reference", &i.fused_text.text)).collect(),
    };
    let scorer = args.scorer.scorer()?;
    let reports = evaluate_outputs(&instances, &outputs, scorer.as_ref(), &args.scorer.eval_config()).await?;
    if let Some(path) = &args.out {
        write_jsonl(path, &reports)?;
    }
    let mut by_system: BTreeMap<&str, Vec<&crate::metrics::ScoreReport>> = BTreeMap::new();
    for r in &reports {
        by_system.entry(r.system_id.as_str()).or_default().push(r);
    }
    let rows: Vec<(String, f64, f64, f64)> = by_system
        .iter()
        .map(|(system, rs)| {
            let n = rs.len() as f64;
            let faith = rs.iter().map(|r| r.faithfulness).sum::<f64>() / n;
            let cov = rs.iter().map(|r| r.coverage).sum::<f64>() / n;
            (system.to_string(), faith, cov, harmonic_mean(faith, cov))
        })
        .collect();
    if args.json {
        emit(out, &serde_json::to_string_pretty(&reports)?)
    } else {
        emit(out, &render_results_table(&rows))
    }
}

fn meta_eval(args: &MetaEvalArgs, out: &mut dyn Write) -> Result<()> {
    let load = |named: &[(String, PathBuf)]| -> Result<BTreeMap<String, Vec<ScoreRecord>>> {
        named
            .iter()
            .map(|(name, path)| {
                let recs: Vec<ScoreRecord> =
                    serde_json::from_str(&read(path)?).map_err(|e| Error::from(e).context(path.display().to_string()))?;
                Ok((name.clone(), recs))
            })
            .collect()
    };
    let config = TableConfig {
        method: args.method,
        bootstrap: BootstrapConfig { n_boot: args.n_boot, sample_size: args.sample_size, seed: args.seed },
    };
    let table = correlation_table(&load(&args.metrics)?, &load(&args.human)?, &config)?;
    if args.json {
        emit(out, &serde_json::to_string_pretty(&table)?)
    } else {
        emit(out, &table.render_text())
    }
}

#[derive(Debug, Serialize)]
struct AgreementReport {
    instances: usize,
    mean_iou: f64,
    kappa: f64,
    per_instance: BTreeMap<String, f64>,
}

fn agreement(args: &AgreementArgs, out: &mut dyn Write) -> Result<()> {
    let a = load_instances(&args.a)?;
    let b: BTreeMap<String, FicInstance> = load_instances(&args.b)?.into_iter().map(|i| (i.instance_id.clone(), i)).collect();
    let aggregation = match args.aggregation {
        IouAggregationArg::SentenceMean => IouAggregation::SentenceMean,
        IouAggregationArg::Pooled => IouAggregation::Pooled,
    };
    let mut per_instance = BTreeMap::new();
    let (mut labels_a, mut labels_b) = (Vec::new(), Vec::new());
    for inst in &a {
        let other = b
            .get(&inst.instance_id)
            .ok_or_else(|| Error::Invalid(format!("instance `{}` missing from {}", inst.instance_id, args.b.display())))?;
        let iou = iou_agreement_with(&inst.alignments, &other.alignments, inst, aggregation)?;
        per_instance.insert(inst.instance_id.clone(), iou.overall);

        // Token-level labels: for each summary sentence, is each review
        // content word aligned to it?
        let sets_a = aligned_token_sets(&inst.alignments, inst)?;
        let sets_b = aligned_token_sets(&other.alignments, inst)?;
        for (sa, sb) in sets_a.iter().zip(&sets_b) {
            for review in &inst.review_set.reviews {
                for (t, token) in review.tokens.iter().enumerate() {
                    if token.is_content_word {
                        let key = (review.id.clone(), t);
                        labels_a.push(sa.contains(&key));
                        labels_b.push(sb.contains(&key));
                    }
                }
            }
        }
    }
    if per_instance.is_empty() {
        return Err(DatasetError::EmptyInput.into());
    }
    let report = AgreementReport {
        instances: per_instance.len(),
        mean_iou: per_instance.values().sum::<f64>() / per_instance.len() as f64,
        kappa: cohens_kappa(&labels_a, &labels_b)?,
        per_instance,
    };
    if args.json {
        emit(out, &serde_json::to_string_pretty(&report)?)
    } else {
        emit(out, &format!("instances  {}\nmean IoU   {:.2}\nkappa      {:.4}", report.instances, report.mean_iou, report.kappa))
    }
}

async fn serve(args: ServeArgs) -> Result<()> {
    let config = StoreConfig { closed_rounds: args.closed_rounds, ..StoreConfig::default() };
    let store = Arc::new(AnnotationStore::open(&args.data_dir, config)?);
    let mut app = annotation::server::router(store.clone());
    if let Some(path) = &args.instances {
        let ctx = leaderboard::server::LeaderboardContext {
            board: Arc::new(Leaderboard::open(&args.data_dir)?),
            instances: Arc::new(load_instances(path)?),
            scorer: args.scorer.scorer()?,
            config: args.scorer.eval_config(),
            judgments: Some(store),
        };
        app = app.merge(leaderboard::server::router(ctx));
    }
    if let Some(assets) = &args.assets {
        app = app.nest_service("/ui", tower_http::services::ServeDir::new(assets));
    }
    let listener = tokio::net::TcpListener::bind(args.bind).await.map_err(|e| Error::Invalid(format!("bind {}: {e}", args.bind)))?;
    tracing::info!(bind = %args.bind, data_dir = %args.data_dir.display(), "serving");
    eprintln!("listening on {}", args.bind);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::Invalid(format!("server error: {e}")))
}

async fn submit(args: &SubmitArgs, out: &mut dyn Write) -> Result<()> {
    let instances = load_instances(&args.instances)?;
    let lines = parse_submission(&read(&args.submission)?)?;
    let scorer = args.scorer.scorer()?;
    let board = Leaderboard::open(&args.data_dir)?;
    let submission =
        board.submit(&args.system_id, &lines, &instances, scorer.as_ref(), &args.scorer.eval_config(), args.replace).await?;
    let s = submission.scores.expect("scored on submit");
    emit(
        out,
        &format!(
            "{}: faithfulness {:.1}  coverage {:.1}  F-1 {:.1}",
            submission.system_id,
            crate::metrics::round1(s.faithfulness),
            crate::metrics::round1(s.coverage),
            crate::metrics::round1(s.f1)
        ),
    )
}

fn show_leaderboard(args: &LeaderboardArgs, out: &mut dyn Write) -> Result<()> {
    let board = Leaderboard::open(&args.data_dir)?;
    let judgments = if args.data_dir.join("annotation.journal.ndjson").exists() {
        Some(AnnotationStore::open(&args.data_dir, StoreConfig::default())?)
    } else {
        None
    };
    let table = board.render(judgments.as_ref());
    if args.json {
        emit(out, &serde_json::to_string_pretty(&table)?)
    } else {
        emit(out, &table.render_text())
    }
}
