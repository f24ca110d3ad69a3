//! The `phishkit` command line.
//!
//! Every subcommand is a pure function of its flags and input files: the
//! only randomness comes from `--seed` and the only clock read happens when
//! `--live-resolvers` is given. Exit codes are 0 on success, 1 for usage
//! errors, 2 for data errors and 3 when training diverges.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifiers::{
    Activation, AnnModel, AnnParams, Classifier, ClassifierError, KernelKind, KernelSpec, LogisticModel, LrParams,
    Model, ModelFile, ModelKind, Preprocessing, SvmModel, SvmParams,
};
use crate::corpus::{
    dataset_to_csv, dedup, generate_synthetic_corpus, load_raw_table, CorpusError, CorpusManifest, LabeledEmail,
    SyntheticSpec,
};
use crate::dataset::Dataset;
use crate::email::{parse_email, parse_mbox, EmailError, RawEmail};
use crate::evaluation::{
    ann_grid, compare_families, evaluate, kernel_comparison, metrics_csv, parse_grid, prepare, regularization_sweep,
    split_indices, text_table, EvalError, GridTable, Metrics, NominalEncoder, PfaDenominator, RawTable, SplitSpec,
    Standardizer, SweepModel, TABLE_ACTIVATIONS, TABLE_ARCHITECTURES,
};
use crate::features::{extract_vector, FeatureConfig, Label, FEATURE_NAMES};
use crate::resolver::{FixtureResolver, Resolver};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "phishkit", version, about = "Phishing email detection from ten heuristic indicators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse emails and write their indicator vectors as a dataset CSV.
    Extract(ExtractArgs),
    /// Write a synthetic indicator dataset drawn from per-class probabilities.
    GenCorpus(GenCorpusArgs),
    /// Fit preprocessing and a classifier, then write a model file.
    Train(TrainArgs),
    /// Score a model file on a dataset.
    Evaluate(EvaluateArgs),
    /// Train one model per regularization strength and tabulate the metrics.
    Sweep(SweepArgs),
    /// Run the architecture, kernel or model comparison grid.
    Table(TableArgs),
    /// Print the verdict for a single email.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct ResolverArgs {
    /// Resolver fixture JSON answering redirect, certificate, rank and age
    /// lookups offline.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Query the network instead of a fixture. Results depend on the day.
    #[arg(long, conflicts_with = "fixtures")]
    pub live_resolvers: bool,
    /// Ranking service URL with a `{host}` placeholder (live mode only).
    #[arg(long, requires = "live_resolvers")]
    pub rank_endpoint: Option<String>,
    /// Feature configuration JSON; the shipped defaults when omitted.
    #[arg(long)]
    pub feature_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// An mbox file, a single .eml file or a directory of .eml files.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Label for every email; otherwise each email's X-Label header is used.
    #[arg(long)]
    pub label: Option<String>,
    /// Drop repeated emails (same subject and body after normalization).
    #[arg(long)]
    pub dedup: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub resolver: ResolverArgs,
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    /// Synthetic spec JSON; the shipped 2000 + 2000 spec when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct HyperArgs {
    /// Regularization strength.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Learning rate (default 0.1 for lr, 0.01 for ann).
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    /// Hidden layer sizes, comma separated.
    #[arg(long, default_value = "100,100", value_delimiter = ',')]
    pub layers: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ActivationArg::Relu)]
    pub activation: ActivationArg,
    #[arg(long, value_enum, default_value_t = KernelArg::Rbf)]
    pub kernel: KernelArg,
    /// SVM penalty.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Kernel scale (default 1 / feature count).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Polynomial kernel degree.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Polynomial or sigmoid kernel offset.
    #[arg(long)]
    pub coef0: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of each class used for fitting; the rest is held out.
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Model file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Metrics CSV to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Score only the rows `train` held out (same seed and fraction).
    #[arg(long)]
    pub holdout: bool,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, value_enum, default_value_t = PfaArg::Standard)]
    pub pfa_denominator: PfaArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Lr)]
    pub model: ModelArg,
    /// `start:stop:step` or a comma-separated list of strengths.
    #[arg(long, default_value = "0:1:0.1")]
    pub grid: String,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, value_enum, default_value_t = PfaArg::Standard)]
    pub pfa_denominator: PfaArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Hidden layouts (100) and (100,100) times relu, tanh and sigmoid.
    Ann,
    /// Linear, cubic, RBF and sigmoid kernels.
    Kernel,
    /// Best ANN, best SVM and best LR side by side.
    Models,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub table: TableKind,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Strengths tried for the LR row of the model comparison.
    #[arg(long, default_value = "0:1:0.1")]
    pub grid: String,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, value_enum, default_value_t = PfaArg::Standard)]
    pub pfa_denominator: PfaArg,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// The .eml file to classify.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub resolver: ResolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Lr,
    Ann,
    Svm,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Lr => ModelKind::Lr,
            ModelArg::Ann => ModelKind::Ann,
            ModelArg::Svm => ModelKind::Svm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActivationArg {
    Relu,
    Tanh,
    Sigmoid,
}

impl From<ActivationArg> for Activation {
    fn from(a: ActivationArg) -> Self {
        match a {
            ActivationArg::Relu => Activation::Relu,
            ActivationArg::Tanh => Activation::Tanh,
            ActivationArg::Sigmoid => Activation::Sigmoid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Linear,
    Poly,
    Rbf,
    Sigmoid,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Linear => KernelKind::Linear,
            KernelArg::Poly => KernelKind::Polynomial,
            KernelArg::Rbf => KernelKind::Rbf,
            KernelArg::Sigmoid => KernelKind::Sigmoid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PfaArg {
    Standard,
    Paper,
}

impl From<PfaArg> for PfaDenominator {
    fn from(p: PfaArg) -> Self {
        match p {
            PfaArg::Standard => PfaDenominator::Standard,
            PfaArg::Paper => PfaDenominator::Paper,
        }
    }
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Divergence(_) => EXIT_DIVERGENCE,
        }
    }

    fn data(context: impl Display, e: impl Display) -> Self {
        CliError::Data(format!("{context}: {e}"))
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Divergence(m) => f.write_str(m),
        }
    }
}

impl From<ClassifierError> for CliError {
    fn from(e: ClassifierError) -> Self {
        match e {
            ClassifierError::NonFiniteLoss { .. } => CliError::Divergence(e.to_string()),
            ClassifierError::InvalidHyperparameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Training { ref source, .. } | EvalError::Classifier(ref source) => {
                match CliError::from(source.clone()) {
                    CliError::Data(_) => CliError::Data(e.to_string()),
                    CliError::Usage(_) => CliError::Usage(e.to_string()),
                    CliError::Divergence(_) => CliError::Divergence(e.to_string()),
                }
            }
            EvalError::InvalidGrid(_) | EvalError::InvalidFraction(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EmailError> for CliError {
    fn from(e: EmailError) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args` (program name first) and runs the subcommand, writing
/// reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Extract(a) => cmd_extract(&a, out),
        Command::GenCorpus(a) => cmd_gen_corpus(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Table(a) => cmd_table(&a, out),
        Command::Classify(a) => cmd_classify(&a, out),
    }
}

fn say(out: &mut dyn Write, text: impl Display) -> CliResult {
    writeln!(out, "{text}").map_err(|e| CliError::data("stdout", e))
}

fn write_file(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| CliError::data(path.display(), e))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(path.display(), e))
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn feature_config(args: &ResolverArgs) -> CliResult<FeatureConfig> {
    match &args.feature_config {
        Some(p) => FeatureConfig::load(p).map_err(|e| CliError::data(p.display(), e)),
        None => Ok(FeatureConfig::default()),
    }
}

fn build_resolver(args: &ResolverArgs) -> CliResult<Box<dyn Resolver>> {
    if let Some(path) = &args.fixtures {
        let r = FixtureResolver::load(path).map_err(|e| CliError::data(path.display(), e))?;
        return Ok(Box::new(r));
    }
    if args.live_resolvers {
        return live_resolver(args);
    }
    Err(CliError::Usage("pass --fixtures <resolver.json> or --live-resolvers".into()))
}

#[cfg(feature = "live")]
fn live_resolver(args: &ResolverArgs) -> CliResult<Box<dyn Resolver>> {
    use crate::resolver::{LiveConfig, LiveResolver};
    let mut config = LiveConfig::new(chrono::Utc::now().date_naive());
    config.rank_endpoint = args.rank_endpoint.clone();
    let r = LiveResolver::new(config).map_err(|e| CliError::data("live resolver", e))?;
    Ok(Box::new(r))
}

#[cfg(not(feature = "live"))]
fn live_resolver(_args: &ResolverArgs) -> CliResult<Box<dyn Resolver>> {
    Err(CliError::Usage("this build has no live resolver support (enable the `live` feature)".into()))
}

/// Raw messages from an mbox file, a single message file or a directory of
/// `.eml` files (in file-name order).
pub fn load_messages(path: &Path) -> CliResult<Vec<RawEmail>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| CliError::data(path.display(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("eml")))
            .collect();
        files.sort();
        return files.iter().map(|p| RawEmail::read(p).map_err(CliError::from)).collect();
    }
    let bytes = std::fs::read(path).map_err(|e| CliError::data(path.display(), e))?;
    if bytes.starts_with(b"From ") || bytes.iter().all(u8::is_ascii_whitespace) {
        let mut messages = parse_mbox(&bytes)?;
        for (i, m) in messages.iter_mut().enumerate() {
            m.source_path = format!("{}#{}", path.display(), i + 1);
        }
        Ok(messages)
    } else {
        Ok(vec![RawEmail::new(path.display().to_string(), bytes)])
    }
}

fn cmd_extract(a: &ExtractArgs, out: &mut dyn Write) -> CliResult {
    let config = feature_config(&a.resolver)?;
    let resolver = build_resolver(&a.resolver)?;
    let forced = match &a.label {
        Some(l) => Some(Label::parse(l).ok_or_else(|| CliError::Usage(format!("unknown label {l:?}")))?),
        None => None,
    };
    let mut corpus = Vec::new();
    for raw in load_messages(&a.input)? {
        let email = parse_email(&raw).map_err(|e| CliError::data(&raw.source_path, e))?;
        let label = forced
            .or_else(|| email.label_hint.as_deref().and_then(Label::parse))
            .ok_or_else(|| CliError::Data(format!("{}: no label (pass --label or add X-Label)", raw.source_path)))?;
        corpus.push(LabeledEmail::new(email, label));
    }
    let removed = if a.dedup {
        let (kept, removed) = dedup(corpus);
        corpus = kept;
        removed
    } else {
        0
    };
    let vectors: Vec<_> = corpus
        .iter()
        .map(|e| extract_vector(&e.email, &config, resolver.as_ref()).with_label(e.label))
        .collect();
    let data = Dataset::from_vectors(&vectors).map_err(|e| CliError::data("extract", e))?;
    write_file(&a.output, &dataset_to_csv(&data)?)?;
    let manifest = CorpusManifest::for_dataset(&data, vec![a.input.display().to_string()], removed, a.seed);
    write_file(&manifest_path(&a.output), &manifest.to_json())?;
    say(out, format!("extracted {} emails ({} duplicates removed) to {}", data.len(), removed, a.output.display()))
}

fn cmd_gen_corpus(a: &GenCorpusArgs, out: &mut dyn Write) -> CliResult {
    let mut spec = match &a.input {
        Some(p) => SyntheticSpec::load(p)?,
        None => SyntheticSpec::default(),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let data = generate_synthetic_corpus(&spec)?;
    write_file(&a.output, &dataset_to_csv(&data)?)?;
    let source = match &a.input {
        Some(p) => format!("synthetic:{}", p.display()),
        None => "synthetic:default".to_string(),
    };
    let manifest = CorpusManifest::for_dataset(&data, vec![source], 0, spec.seed);
    write_file(&manifest_path(&a.output), &manifest.to_json())?;
    say(out, format!("wrote {} rows ({} per class) to {}", data.len(), spec.n_per_class, a.output.display()))
}

fn kernel_spec(h: &HyperArgs, n_features: usize) -> KernelSpec {
    let mut k = KernelSpec::with_defaults(h.kernel.into(), n_features);
    if let Some(g) = h.gamma {
        k.gamma = g;
    }
    if let Some(d) = h.degree {
        k.degree = d;
    }
    if let Some(c) = h.coef0 {
        k.coef0 = c;
    }
    k
}

fn lr_params(h: &HyperArgs) -> LrParams {
    LrParams { lambda: h.lambda, learning_rate: h.lr.unwrap_or(0.1), epochs: h.epochs }
}

fn ann_params(h: &HyperArgs, seed: u64) -> AnnParams {
    AnnParams {
        hidden_layers: h.layers.clone(),
        activation: h.activation.into(),
        lambda: h.lambda,
        learning_rate: h.lr.unwrap_or(0.01),
        epochs: h.epochs,
        seed,
    }
}

fn svm_params(h: &HyperArgs, n_features: usize) -> SvmParams {
    SvmParams { c: h.c, ..SvmParams::new(kernel_spec(h, n_features)) }
}

fn train_model(kind: ModelKind, h: &HyperArgs, seed: u64, data: &Dataset) -> CliResult<Model> {
    Ok(match kind {
        ModelKind::Lr => LogisticModel::train(data, &lr_params(h))?.into(),
        ModelKind::Ann => AnnModel::train(data, &ann_params(h, seed))?.into(),
        ModelKind::Svm => SvmModel::train(data, &svm_params(h, data.n_features()))?.into(),
    })
}

fn load_table(path: &Path) -> CliResult<RawTable> {
    load_raw_table(path).map_err(|e| match e {
        CorpusError::Io { .. } => CliError::from(e),
        other => CliError::data(path.display(), other),
    })
}

fn select_rows(table: &RawTable, idx: &[usize]) -> RawTable {
    RawTable {
        header: table.header.clone(),
        rows: idx.iter().map(|&i| table.rows[i].clone()).collect(),
        labels: idx.iter().map(|&i| table.labels[i]).collect(),
    }
}

fn split_table(table: &RawTable, split: &SplitArgs) -> CliResult<(RawTable, RawTable)> {
    let spec = SplitSpec::new(split.train_fraction, split.seed);
    let (train, test) = split_indices(&table.labels, &spec)?;
    Ok((select_rows(table, &train), select_rows(table, &test)))
}

fn metrics_line(m: &Metrics) -> String {
    format!("p_d={:.4} p_fa={:.4} p_md={:.4} accuracy={:.4}", m.p_d, m.p_fa, m.p_md, m.accuracy)
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> CliResult {
    let table = load_table(&a.input)?;
    let labels_present = (table.labels.contains(&0), table.labels.contains(&1));
    if labels_present != (true, true) {
        return Err(ClassifierError::SingleClassData.into());
    }
    let (train_raw, test_raw) = split_table(&table, &a.split)?;
    let encoder = NominalEncoder::fit(&train_raw);
    let train_encoded = encoder.encode(&train_raw)?;
    let standardizer = Standardizer::fit(&train_encoded)?;
    let train = standardizer.transform(&train_encoded)?;
    let model = train_model(a.model.into(), &a.hyper, a.split.seed, &train)?;
    if let Model::Svm(svm) = &model {
        if !svm.converged {
            say(out, format!("warning: SMO stopped after {} iterations (gap {:.3e})", svm.iterations, svm.kkt_gap))?;
        }
    }
    let test = standardizer.transform(&encoder.encode(&test_raw)?)?;
    let (_, train_metrics) = evaluate(&model, &train, PfaDenominator::Standard)?;
    let (_, test_metrics) = evaluate(&model, &test, PfaDenominator::Standard)?;
    let preprocessing = Preprocessing {
        encoder: (!encoder.is_numeric()).then_some(encoder),
        standardizer: Some(standardizer),
    };
    let file = ModelFile::new(model, preprocessing);
    write_file(&a.output, &crate::classifiers::serialize_model(&file))?;
    say(out, format!("trained {} on {} rows, held out {}", file.model.kind(), train.len(), test.len()))?;
    say(out, format!("train   {}", metrics_line(&train_metrics)))?;
    say(out, format!("holdout {}", metrics_line(&test_metrics)))?;
    say(out, format!("model written to {}", a.output.display()))
}

fn load_model(path: &Path) -> CliResult<ModelFile> {
    crate::classifiers::deserialize_model(&read_file(path)?).map_err(|e| CliError::data(path.display(), e))
}

fn apply_preprocessing(pre: &Preprocessing, table: &RawTable) -> CliResult<Dataset> {
    let encoded = match &pre.encoder {
        Some(enc) => enc.encode(table)?,
        None => {
            let columns: Vec<&str> = table.header.iter().map(String::as_str).collect();
            NominalEncoder::numeric(&columns).encode(table)?
        }
    };
    Ok(match &pre.standardizer {
        Some(s) => s.transform(&encoded)?,
        None => encoded,
    })
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> CliResult {
    let file = load_model(&a.model)?;
    let mut table = load_table(&a.input)?;
    if a.holdout {
        table = split_table(&table, &a.split)?.1;
    }
    let data = apply_preprocessing(&file.preprocessing, &table)?;
    let (cm, metrics) = evaluate(&file.model, &data, a.pfa_denominator.into())?;
    let rows = vec![(file.model.kind().to_string(), metrics)];
    if let Some(path) = &a.output {
        write_file(path, &metrics_csv(&rows))?;
    }
    say(out, format!("tp={} fp={} tn={} fn={}", cm.tp, cm.fp, cm.tn, cm.fn_))?;
    say(out, metrics_line(&metrics))?;
    say(out, text_table("Evaluation", "Model", &rows))
}

fn prepared(input: &Path, split: &SplitArgs) -> CliResult<crate::evaluation::PreparedSplit> {
    let table = load_table(input)?;
    let data = NominalEncoder::fit(&table).encode(&table)?;
    Ok(prepare(&data, &SplitSpec::new(split.train_fraction, split.seed))?)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let grid = parse_grid(&a.grid)?;
    let model = match a.model {
        ModelArg::Lr => SweepModel::Lr(lr_params(&a.hyper)),
        ModelArg::Ann => SweepModel::Ann(ann_params(&a.hyper, a.split.seed)),
        ModelArg::Svm => return Err(CliError::Usage("sweep supports --model lr or ann".into())),
    };
    let split = prepared(&a.input, &a.split)?;
    let result = regularization_sweep(&split, &model, &grid, a.pfa_denominator.into())?;
    let rows = result.rows();
    write_file(&a.output, &metrics_csv(&rows))?;
    say(out, text_table("Regularization sweep", "lambda", &rows))
}

fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> CliResult {
    let split = prepared(&a.input, &a.split)?;
    let pfa = a.pfa_denominator.into();
    let n_features = split.train.n_features();
    let ann_base = ann_params(&a.hyper, a.split.seed);
    let svm_base = svm_params(&a.hyper, n_features);
    let (title, first, table): (&str, &str, GridTable) = match a.table {
        TableKind::Ann => (
            "ANN architectures",
            "Layers/activation",
            ann_grid(&split, &TABLE_ARCHITECTURES, &TABLE_ACTIVATIONS, &ann_base, pfa)?,
        ),
        TableKind::Kernel => ("SVM kernels", "Kernel", kernel_comparison(&split, &svm_base, pfa)?),
        TableKind::Models => {
            let grid = parse_grid(&a.grid)?;
            let ann = ann_grid(&split, &TABLE_ARCHITECTURES, &TABLE_ACTIVATIONS, &ann_base, pfa)?;
            let svm = kernel_comparison(&split, &svm_base, pfa)?;
            let lr = regularization_sweep(&split, &SweepModel::Lr(lr_params(&a.hyper)), &grid, pfa)?;
            ("Model comparison", "Model", compare_families(&ann, &svm, &lr))
        }
    };
    let rows = table.metric_rows();
    write_file(&a.output, &metrics_csv(&rows))?;
    say(out, text_table(title, first, &rows))?;
    say(out, format!("best: {}", table.best().label))
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    let file = load_model(&a.model)?;
    let config = feature_config(&a.resolver)?;
    let resolver = build_resolver(&a.resolver)?;
    let raw = RawEmail::read(&a.input)?;
    let email = parse_email(&raw).map_err(|e| CliError::data(a.input.display(), e))?;
    let vector = extract_vector(&email, &config, resolver.as_ref());
    let cells: Vec<String> = vector.indicators.iter().map(u8::to_string).collect();
    let table = RawTable {
        header: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        rows: vec![cells],
        labels: vec![0],
    };
    let x = apply_preprocessing(&file.preprocessing, &table)?;
    let score = file.model.score(x.row(0))?;
    let verdict = Label::from_u8(file.model.predict(x.row(0))?).expect("binary prediction");
    let fired = vector.fired();
    let fired = if fired.is_empty() { "none".to_string() } else { fired.join(",") };
    say(out, format!("{verdict} score={score:.4} fired={fired}"))
}
