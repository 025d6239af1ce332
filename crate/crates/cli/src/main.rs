//! `distillery` — command-line front end for the corpus, toy-MT,
//! metric, and quantization toolkit, plus an experiment runner that
//! drives a whole teacher -> data -> student -> evaluation recipe from a
//! single TOML config.
//!
//! Exit codes are stable per failure class: 2 for bad usage or config,
//! 3 for data problems, 4 for backend trouble, 5 for internal errors.

mod config;
mod runner;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use distillery_core::backend::{Backend, BackendSpec, Transport, DEFAULT_BATCH_SIZE};
use distillery_core::corpus::{
    load_mono, load_parallel, save_mono, save_parallel, MonoCorpus, ParallelCorpus,
};
use distillery_core::metrics::{
    bleu, chrf, paired_bootstrap, ter, BootstrapMetric, Smoothing, Tokenizer,
};
use distillery_core::origin::{self, load_sgml, load_tsv, OriginBucket, TestSet};
use distillery_core::pipeline::{self, RecipePart};
use distillery_core::quant::{self, QuantMode};
use distillery_core::toymt::{train_ibm1, LexTable};
use distillery_core::ErrorClass;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, arguments, or config contents.
    Usage(String),
    /// An operation failed; exit code follows the error's class.
    Core(distillery_core::Error),
    /// A `run` stage failed part-way through an experiment.
    Stage {
        stage: String,
        completed: Vec<String>,
        source: distillery_core::Error,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Stage {
                stage,
                completed,
                source,
            } => {
                let done = if completed.is_empty() {
                    "none".to_string()
                } else {
                    completed.join(", ")
                };
                write!(f, "stage `{stage}` failed (completed: {done}): {source}")
            }
        }
    }
}

impl From<distillery_core::Error> for CliError {
    fn from(e: distillery_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        let class = match self {
            CliError::Usage(_) => return 2,
            CliError::Core(e) => e.class(),
            CliError::Stage { source, .. } => source.class(),
        };
        match class {
            ErrorClass::Data => 3,
            ErrorClass::Backend => 4,
            ErrorClass::Internal => 5,
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(
    name = "distillery",
    version,
    about = "Corpus pipeline, toy MT, and evaluation toolkit for knowledge distillation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drop sentence pairs with too few or too many words on either side.
    Clean(CleanArgs),
    /// Split a corpus into N contiguous, near-equal chunks.
    Chunk(ChunkArgs),
    /// Take a seeded random sample, preserving corpus order.
    Sample(SampleArgs),
    /// Repeat a corpus (plus a sampled remainder) up to a target size.
    Oversample(OversampleArgs),
    /// Concatenate corpora that share a language (pair).
    Concat(ConcatArgs),
    /// Translate a sentence file with a backend.
    Translate(TranslateArgs),
    /// Back-translate target-language text into synthetic source text.
    Bt(BtArgs),
    /// Forward-translate source-language text with a teacher.
    Ft(FtArgs),
    /// Re-translate the target side of a parallel corpus with a teacher.
    Distill(DistillArgs),
    /// Round trip: back-translate, then forward-translate the result.
    Ftbt(FtbtArgs),
    /// Mix parallel corpora to exact budgets and write a manifest.
    Compose(ComposeArgs),
    /// Train the toy IBM-1 lexical model on a parallel corpus.
    TrainToy(TrainToyArgs),
    /// Drop unlikely entries from a lexical model.
    Prune(PruneArgs),
    /// Quantize a lexical model and pack it into the binary format.
    Quantize(QuantizeArgs),
    /// Score hypotheses against references with BLEU, chrF, or TER.
    Score(ScoreArgs),
    /// Paired bootstrap significance test between two systems.
    Bootstrap(BootstrapArgs),
    /// Split a test set by original language and print bucket sizes.
    SplitOriglang(SplitArgs),
    /// Type-token ratio of a sentence file.
    Ttr(TtrArgs),
    /// Send one probe sentence through a backend.
    Probe(ProbeArgs),
    /// Execute a full experiment from a TOML config.
    Run(RunArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Clean(args) => cmd_clean(args),
        Command::Chunk(args) => cmd_chunk(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Oversample(args) => cmd_oversample(args),
        Command::Concat(args) => cmd_concat(args),
        Command::Translate(args) => cmd_translate(args),
        Command::Bt(args) => cmd_bt(args),
        Command::Ft(args) => cmd_ft(args),
        Command::Distill(args) => cmd_distill(args),
        Command::Ftbt(args) => cmd_ftbt(args),
        Command::Compose(args) => cmd_compose(args),
        Command::TrainToy(args) => cmd_train_toy(args),
        Command::Prune(args) => cmd_prune(args),
        Command::Quantize(args) => cmd_quantize(args),
        Command::Score(args) => cmd_score(args),
        Command::Bootstrap(args) => cmd_bootstrap(args),
        Command::SplitOriglang(args) => cmd_split(args),
        Command::Ttr(args) => cmd_ttr(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Run(args) => runner::run(&args.config, &args.out_dir),
    }
}

// ----- shared flag blocks ------------------------------------------

/// Input selection: either one monolingual file or a src/tgt pair.
/// Sidecar `.meta.jsonl` files are read and written automatically.
#[derive(Args)]
struct CorpusIn {
    /// Monolingual sentence file.
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["src", "tgt"])]
    input: Option<PathBuf>,
    /// Source-side sentence file (parallel mode).
    #[arg(long, requires = "tgt")]
    src: Option<PathBuf>,
    /// Target-side sentence file (parallel mode).
    #[arg(long, requires = "src")]
    tgt: Option<PathBuf>,
    /// Language code of a monolingual input.
    #[arg(long, default_value = "src")]
    lang: String,
    /// Source language code.
    #[arg(long, default_value = "src")]
    src_lang: String,
    /// Target language code.
    #[arg(long, default_value = "tgt")]
    tgt_lang: String,
}

enum Loaded {
    Mono(MonoCorpus),
    Parallel(ParallelCorpus),
}

impl CorpusIn {
    fn load(&self) -> Result<Loaded, CliError> {
        match (&self.input, &self.src, &self.tgt) {
            (Some(path), None, None) => Ok(Loaded::Mono(load_mono(path, &self.lang)?)),
            (None, Some(src), Some(tgt)) => Ok(Loaded::Parallel(load_parallel(
                src,
                tgt,
                &self.src_lang,
                &self.tgt_lang,
            )?)),
            _ => Err(CliError::Usage(
                "give either --in FILE (monolingual) or --src FILE --tgt FILE (parallel)".into(),
            )),
        }
    }
}

/// Output selection matching `CorpusIn`.
#[derive(Args)]
struct CorpusOut {
    /// Output file for a monolingual result.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Source-side output file (parallel mode).
    #[arg(long, requires = "out_tgt")]
    out_src: Option<PathBuf>,
    /// Target-side output file (parallel mode).
    #[arg(long, requires = "out_src")]
    out_tgt: Option<PathBuf>,
}

impl CorpusOut {
    fn save(&self, result: &Loaded) -> CliResult {
        match (result, &self.out, &self.out_src, &self.out_tgt) {
            (Loaded::Mono(m), Some(out), None, None) => Ok(save_mono(m, out)?),
            (Loaded::Parallel(p), None, Some(src), Some(tgt)) => Ok(save_parallel(p, src, tgt)?),
            (Loaded::Mono(_), _, _, _) => {
                Err(CliError::Usage("monolingual input needs --out FILE".into()))
            }
            (Loaded::Parallel(_), _, _, _) => Err(CliError::Usage(
                "parallel input needs --out-src FILE --out-tgt FILE".into(),
            )),
        }
    }
}

/// How to reach a translation backend.
#[derive(Args, Clone)]
struct BackendOpts {
    /// Command line to spawn per batch, e.g. "cat" or "mymt --beam 1".
    #[arg(long, group = "transport")]
    cmd: Option<String>,
    /// HTTP endpoint to POST batches to.
    #[arg(long, group = "transport")]
    url: Option<String>,
    /// Lexical-table TSV for the in-process toy translator.
    #[arg(long, group = "transport")]
    model: Option<PathBuf>,
    /// Backend identifier, recorded in output provenance.
    #[arg(long, default_value = "backend")]
    id: String,
    /// Kill a command backend after this many seconds per batch.
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Sentences per request.
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    batch_size: usize,
}

impl BackendOpts {
    fn build(&self, src: &str, tgt: &str) -> Result<Backend, CliError> {
        let transport = match (&self.cmd, &self.url, &self.model) {
            (Some(cmd), None, None) => Transport::Command {
                argv: split_command(cmd)?,
                timeout_secs: self.timeout_secs,
            },
            (None, Some(url), None) => Transport::Http {
                url: url.clone(),
                timeout_secs: self.timeout_secs,
            },
            (None, None, Some(model)) => Transport::Toy {
                model: model.clone(),
            },
            _ => {
                return Err(CliError::Usage(
                    "pick exactly one of --cmd, --url, or --model".into(),
                ))
            }
        };
        Ok(Backend::new(BackendSpec {
            id: self.id.clone(),
            src: src.to_string(),
            tgt: tgt.to_string(),
            transport,
            batch_size: self.batch_size,
        })?)
    }
}

fn split_command(cmd: &str) -> Result<Vec<String>, CliError> {
    let argv = shlex::split(cmd)
        .ok_or_else(|| CliError::Usage(format!("unparseable command line {cmd:?}")))?;
    if argv.is_empty() {
        return Err(CliError::Usage("empty command line".into()));
    }
    Ok(argv)
}

#[derive(Args)]
struct LangPair {
    /// Source language code.
    #[arg(long, default_value = "src")]
    src_lang: String,
    /// Target language code.
    #[arg(long, default_value = "tgt")]
    tgt_lang: String,
}

// ----- corpus operations -------------------------------------------

#[derive(Args)]
struct CleanArgs {
    #[command(flatten)]
    input: CorpusIn,
    #[command(flatten)]
    output: CorpusOut,
    /// Minimum words per side, inclusive.
    #[arg(long, default_value_t = 3)]
    min_words: usize,
    /// Maximum words per side, inclusive.
    #[arg(long, default_value_t = 150)]
    max_words: usize,
}

fn cmd_clean(args: CleanArgs) -> CliResult {
    let loaded = args.input.load()?;
    let (before, cleaned) = match loaded {
        Loaded::Mono(m) => (
            m.len(),
            Loaded::Mono(m.clean(args.min_words, args.max_words)?),
        ),
        Loaded::Parallel(p) => (
            p.len(),
            Loaded::Parallel(p.clean(args.min_words, args.max_words)?),
        ),
    };
    args.output.save(&cleaned)?;
    let after = match &cleaned {
        Loaded::Mono(m) => m.len(),
        Loaded::Parallel(p) => p.len(),
    };
    println!("kept {after} of {before}");
    Ok(())
}

#[derive(Args)]
struct ChunkArgs {
    #[command(flatten)]
    input: CorpusIn,
    /// Number of chunks.
    #[arg(long)]
    parts: usize,
    /// Directory for the chunk files, named part-000, part-001, ...
    #[arg(long)]
    out_dir: PathBuf,
}

fn cmd_chunk(args: ChunkArgs) -> CliResult {
    std::fs::create_dir_all(&args.out_dir).map_err(|source| distillery_core::Error::Io {
        path: args.out_dir.clone(),
        source,
    })?;
    match args.input.load()? {
        Loaded::Mono(m) => {
            for (i, chunk) in m.chunk(args.parts)?.iter().enumerate() {
                let path = args.out_dir.join(format!("part-{i:03}.{}.txt", chunk.lang));
                save_mono(chunk, &path)?;
                println!("{} {}", path.display(), chunk.len());
            }
        }
        Loaded::Parallel(p) => {
            for (i, chunk) in p.chunk(args.parts)?.iter().enumerate() {
                let src = args
                    .out_dir
                    .join(format!("part-{i:03}.{}.txt", chunk.src_lang));
                let tgt = args
                    .out_dir
                    .join(format!("part-{i:03}.{}.txt", chunk.tgt_lang));
                save_parallel(chunk, &src, &tgt)?;
                println!("{} {} {}", src.display(), tgt.display(), chunk.len());
            }
        }
    }
    Ok(())
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    input: CorpusIn,
    #[command(flatten)]
    output: CorpusOut,
    /// Sample size.
    #[arg(long)]
    take: usize,
    #[arg(long)]
    seed: u64,
}

fn cmd_sample(args: SampleArgs) -> CliResult {
    let sampled = match args.input.load()? {
        Loaded::Mono(m) => Loaded::Mono(m.sample(args.take, args.seed)?),
        Loaded::Parallel(p) => Loaded::Parallel(p.sample(args.take, args.seed)?),
    };
    args.output.save(&sampled)
}

#[derive(Args)]
struct OversampleArgs {
    #[command(flatten)]
    input: CorpusIn,
    #[command(flatten)]
    output: CorpusOut,
    /// Target size, at least the corpus size.
    #[arg(long)]
    target: usize,
    #[arg(long)]
    seed: u64,
}

fn cmd_oversample(args: OversampleArgs) -> CliResult {
    let grown = match args.input.load()? {
        Loaded::Mono(m) => Loaded::Mono(m.oversample(args.target, args.seed)?),
        Loaded::Parallel(p) => Loaded::Parallel(p.oversample(args.target, args.seed)?),
    };
    args.output.save(&grown)
}

#[derive(Args)]
struct ConcatArgs {
    /// Monolingual inputs, in order.
    #[arg(long = "in", value_name = "FILE", num_args = 1.., conflicts_with_all = ["srcs", "tgts"])]
    inputs: Vec<PathBuf>,
    /// Source-side inputs, in order (parallel mode).
    #[arg(long, num_args = 1.., requires = "tgts")]
    srcs: Vec<PathBuf>,
    /// Target-side inputs, in order (parallel mode).
    #[arg(long, num_args = 1.., requires = "srcs")]
    tgts: Vec<PathBuf>,
    #[arg(long, default_value = "src")]
    lang: String,
    #[arg(long, default_value = "src")]
    src_lang: String,
    #[arg(long, default_value = "tgt")]
    tgt_lang: String,
    #[command(flatten)]
    output: CorpusOut,
}

fn cmd_concat(args: ConcatArgs) -> CliResult {
    if !args.inputs.is_empty() {
        let parts = args
            .inputs
            .iter()
            .map(|p| load_mono(p, &args.lang))
            .collect::<Result<Vec<_>, _>>()?;
        let joined = MonoCorpus::concat(&parts)?;
        println!("{} sentences", joined.len());
        return args.output.save(&Loaded::Mono(joined));
    }
    if args.srcs.is_empty() {
        return Err(CliError::Usage(
            "give --in FILE... (monolingual) or --srcs FILE... --tgts FILE... (parallel)".into(),
        ));
    }
    if args.srcs.len() != args.tgts.len() {
        return Err(CliError::Usage(format!(
            "{} source files but {} target files",
            args.srcs.len(),
            args.tgts.len()
        )));
    }
    let parts = args
        .srcs
        .iter()
        .zip(&args.tgts)
        .map(|(s, t)| load_parallel(s, t, &args.src_lang, &args.tgt_lang))
        .collect::<Result<Vec<_>, _>>()?;
    let joined = ParallelCorpus::concat(&parts)?;
    println!("{} pairs", joined.len());
    args.output.save(&Loaded::Parallel(joined))
}

// ----- translation pipeline ----------------------------------------

#[derive(Args)]
struct TranslateArgs {
    /// Sentence file to translate.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    langs: LangPair,
    #[command(flatten)]
    backend: BackendOpts,
}

fn cmd_translate(args: TranslateArgs) -> CliResult {
    let backend = args
        .backend
        .build(&args.langs.src_lang, &args.langs.tgt_lang)?;
    let mono = load_mono(&args.input, &args.langs.src_lang)?;
    let translated = pipeline::translate_mono(&mono, &backend)?;
    save_mono(&translated, &args.out)?;
    println!("translated {} sentences", translated.len());
    Ok(())
}

#[derive(Args)]
struct BtArgs {
    /// Target-language sentence file to back-translate.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_src: PathBuf,
    #[arg(long)]
    out_tgt: PathBuf,
    #[command(flatten)]
    langs: LangPair,
    /// Reverse-direction backend (target -> source).
    #[command(flatten)]
    backend: BackendOpts,
}

fn cmd_bt(args: BtArgs) -> CliResult {
    let reverse = args
        .backend
        .build(&args.langs.tgt_lang, &args.langs.src_lang)?;
    let mono = load_mono(&args.input, &args.langs.tgt_lang)?;
    let corpus = pipeline::back_translate(&mono, &reverse)?;
    save_parallel(&corpus, &args.out_src, &args.out_tgt)?;
    println!("{} pairs", corpus.len());
    Ok(())
}

#[derive(Args)]
struct FtArgs {
    /// Source-language sentence file to forward-translate.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_src: PathBuf,
    #[arg(long)]
    out_tgt: PathBuf,
    #[command(flatten)]
    langs: LangPair,
    #[command(flatten)]
    backend: BackendOpts,
}

fn cmd_ft(args: FtArgs) -> CliResult {
    let teacher = args
        .backend
        .build(&args.langs.src_lang, &args.langs.tgt_lang)?;
    let mono = load_mono(&args.input, &args.langs.src_lang)?;
    let corpus = pipeline::forward_translate_mono(&mono, &teacher)?;
    save_parallel(&corpus, &args.out_src, &args.out_tgt)?;
    println!("{} pairs", corpus.len());
    Ok(())
}

#[derive(Args)]
struct DistillArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[arg(long)]
    out_src: PathBuf,
    #[arg(long)]
    out_tgt: PathBuf,
    #[command(flatten)]
    langs: LangPair,
    #[command(flatten)]
    backend: BackendOpts,
}

fn cmd_distill(args: DistillArgs) -> CliResult {
    let teacher = args
        .backend
        .build(&args.langs.src_lang, &args.langs.tgt_lang)?;
    let corpus = load_parallel(
        &args.src,
        &args.tgt,
        &args.langs.src_lang,
        &args.langs.tgt_lang,
    )?;
    let distilled = pipeline::distill_parallel(&corpus, &teacher)?;
    save_parallel(&distilled, &args.out_src, &args.out_tgt)?;
    println!("{} pairs", distilled.len());
    Ok(())
}

#[derive(Args)]
struct FtbtArgs {
    /// Target-language sentence file to round-trip.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_src: PathBuf,
    #[arg(long)]
    out_tgt: PathBuf,
    #[command(flatten)]
    langs: LangPair,
    /// Reverse-direction command (target -> source).
    #[arg(long, group = "rev_transport")]
    rev: Option<String>,
    /// Reverse-direction toy model TSV.
    #[arg(long, group = "rev_transport")]
    rev_model: Option<PathBuf>,
    /// Forward-direction command (source -> target).
    #[arg(long, group = "fwd_transport")]
    fwd: Option<String>,
    /// Forward-direction toy model TSV.
    #[arg(long, group = "fwd_transport")]
    fwd_model: Option<PathBuf>,
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    batch_size: usize,
}

impl FtbtArgs {
    fn backend(
        &self,
        id: &str,
        cmd: &Option<String>,
        model: &Option<PathBuf>,
        src: &str,
        tgt: &str,
    ) -> Result<Backend, CliError> {
        let transport = match (cmd, model) {
            (Some(cmd), None) => Transport::Command {
                argv: split_command(cmd)?,
                timeout_secs: self.timeout_secs,
            },
            (None, Some(model)) => Transport::Toy {
                model: model.clone(),
            },
            _ => {
                return Err(CliError::Usage(format!(
                    "give exactly one of --{id} or --{id}-model"
                )))
            }
        };
        Ok(Backend::new(BackendSpec {
            id: id.to_string(),
            src: src.to_string(),
            tgt: tgt.to_string(),
            transport,
            batch_size: self.batch_size,
        })?)
    }
}

fn cmd_ftbt(args: FtbtArgs) -> CliResult {
    let reverse = args.backend(
        "rev",
        &args.rev,
        &args.rev_model,
        &args.langs.tgt_lang,
        &args.langs.src_lang,
    )?;
    let forward = args.backend(
        "fwd",
        &args.fwd,
        &args.fwd_model,
        &args.langs.src_lang,
        &args.langs.tgt_lang,
    )?;
    let mono = load_mono(&args.input, &args.langs.tgt_lang)?;
    let corpus = pipeline::round_trip(&mono, &reverse, &forward)?;
    save_parallel(&corpus, &args.out_src, &args.out_tgt)?;
    println!("{} pairs", corpus.len());
    Ok(())
}

#[derive(Args)]
struct ComposeArgs {
    /// One part: TAKE SRC_FILE TGT_FILE.  Repeatable, order kept.
    #[arg(long, num_args = 3, value_names = ["TAKE", "SRC", "TGT"], required = true)]
    part: Vec<String>,
    #[arg(long)]
    out_src: PathBuf,
    #[arg(long)]
    out_tgt: PathBuf,
    /// Manifest JSON describing what was taken from where.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "src")]
    src_lang: String,
    #[arg(long, default_value = "tgt")]
    tgt_lang: String,
}

fn cmd_compose(args: ComposeArgs) -> CliResult {
    let mut parts = Vec::new();
    for (i, triple) in args.part.chunks(3).enumerate() {
        let take: usize = triple[0].parse().map_err(|_| {
            CliError::Usage(format!("--part TAKE must be a number, got {:?}", triple[0]))
        })?;
        let src = PathBuf::from(&triple[1]);
        let tgt = PathBuf::from(&triple[2]);
        let name = src
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("part-{i}"));
        let corpus = load_parallel(&src, &tgt, &args.src_lang, &args.tgt_lang)?;
        parts.push(RecipePart {
            seed: runner::stage_seed(args.seed, &format!("compose/{i}/{name}")),
            name,
            corpus,
            take,
        });
    }
    let (combined, manifest) = pipeline::compose(&parts)?;
    save_parallel(&combined, &args.out_src, &args.out_tgt)?;
    if let Some(path) = &args.manifest {
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serializable");
        bytes.push(b'\n');
        std::fs::write(path, bytes).map_err(|source| distillery_core::Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    println!("{} pairs from {} parts", combined.len(), parts.len());
    Ok(())
}

// ----- toy models ---------------------------------------------------

#[derive(Args)]
struct TrainToyArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[command(flatten)]
    langs: LangPair,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    /// Where to write the lexical table TSV.
    #[arg(long)]
    out: PathBuf,
}

fn cmd_train_toy(args: TrainToyArgs) -> CliResult {
    let corpus = load_parallel(
        &args.src,
        &args.tgt,
        &args.langs.src_lang,
        &args.langs.tgt_lang,
    )?;
    let (table, ll) = train_ibm1(&corpus, args.iterations)?;
    table.save(&args.out)?;
    for (i, value) in ll.iter().enumerate() {
        println!("iter {i} ll {value}");
    }
    println!(
        "{} entries, {} source words, {} target words",
        table.entry_count(),
        table.source_vocab(),
        table.target_vocab()
    );
    Ok(())
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Drop entries below this probability.
    #[arg(long, default_value_t = 0.0)]
    min_prob: f64,
    /// Keep at most this many entries per source word.
    #[arg(long)]
    top_k: Option<usize>,
}

fn cmd_prune(args: PruneArgs) -> CliResult {
    let table = LexTable::load(&args.model)?;
    let pruned = table.prune(args.min_prob, args.top_k);
    pruned.save(&args.out)?;
    println!(
        "{} entries -> {} entries",
        table.entry_count(),
        pruned.entry_count()
    );
    Ok(())
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Codebook family: fixed or log.
    #[arg(long)]
    mode: QuantMode,
    #[arg(long)]
    bits: u8,
    /// Packed binary output.
    #[arg(long)]
    out: PathBuf,
    /// Optional TSV dump of the quantized (renormalized) table.
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn cmd_quantize(args: QuantizeArgs) -> CliResult {
    let table = LexTable::load(&args.model)?;
    let (quantized, stats) = quant::quantize(&table, args.mode, args.bits)?;
    quant::save_packed(&quantized, args.mode, args.bits, &args.out)?;
    if let Some(dump) = &args.dump {
        quantized.save(dump)?;
    }
    let size = quant::size_report(&table, args.mode, args.bits)?;
    println!("{}", serde_json::to_string(&stats).expect("serializable"));
    println!("{}", serde_json::to_string(&size).expect("serializable"));
    Ok(())
}

// ----- evaluation ---------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Bleu,
    Chrf,
    Ter,
}

#[derive(Args)]
struct MetricOpts {
    #[arg(long, default_value = "13a")]
    tokenizer: Tokenizer,
    #[arg(long, default_value = "none")]
    smoothing: Smoothing,
    /// Highest character n-gram order for chrF.
    #[arg(long, default_value_t = distillery_core::metrics::DEFAULT_MAX_N)]
    max_n: usize,
    /// Recall weight for chrF.
    #[arg(long, default_value_t = distillery_core::metrics::DEFAULT_BETA)]
    beta: f64,
    /// Longest distance a TER shift may travel.
    #[arg(long, default_value_t = distillery_core::metrics::DEFAULT_MAX_SHIFT_DIST)]
    max_shift_dist: usize,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    metric: MetricName,
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[command(flatten)]
    opts: MetricOpts,
    /// Print the full score breakdown as JSON.
    #[arg(long)]
    json: bool,
}

fn cmd_score(args: ScoreArgs) -> CliResult {
    let hyps = read_lines(&args.hyp)?;
    let refs = read_lines(&args.reference)?;
    match args.metric {
        MetricName::Bleu => {
            let score = bleu(&hyps, &refs, args.opts.tokenizer, args.opts.smoothing)?;
            if args.json {
                println!("{}", serde_json::to_string(&score).expect("serializable"));
            } else {
                println!("{:.1}", score.score);
            }
        }
        MetricName::Chrf => {
            let score = chrf(&hyps, &refs, args.opts.max_n, args.opts.beta)?;
            if args.json {
                println!("{}", serde_json::json!({ "chrf": score }));
            } else {
                println!("{score:.1}");
            }
        }
        MetricName::Ter => {
            let score = ter(&hyps, &refs, args.opts.max_shift_dist)?;
            if args.json {
                println!("{}", serde_json::to_string(&score).expect("serializable"));
            } else {
                println!("{:.3}", score.score);
            }
        }
    }
    Ok(())
}

#[derive(Args)]
struct BootstrapArgs {
    #[arg(long)]
    metric: MetricName,
    #[arg(long)]
    hyp_a: PathBuf,
    #[arg(long)]
    hyp_b: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    opts: MetricOpts,
}

fn cmd_bootstrap(args: BootstrapArgs) -> CliResult {
    let hyps_a = read_lines(&args.hyp_a)?;
    let hyps_b = read_lines(&args.hyp_b)?;
    let refs = read_lines(&args.reference)?;
    let metric = match args.metric {
        MetricName::Bleu => BootstrapMetric::Bleu {
            tokenizer: args.opts.tokenizer,
            smoothing: args.opts.smoothing,
        },
        MetricName::Chrf => BootstrapMetric::Chrf {
            max_n: args.opts.max_n,
            beta: args.opts.beta,
        },
        MetricName::Ter => BootstrapMetric::Ter {
            max_shift_dist: args.opts.max_shift_dist,
        },
    };
    let result = paired_bootstrap(metric, &hyps_a, &hyps_b, &refs, args.resamples, args.seed)?;
    println!("{}", serde_json::to_string(&result).expect("serializable"));
    Ok(())
}

#[derive(Args)]
struct SplitArgs {
    /// Test set: SGML (.sgm/.sgml) or segment TSV.
    testset: PathBuf,
    /// Sentence file for a TSV test set.
    #[arg(long)]
    lines: Option<PathBuf>,
    #[arg(long)]
    src_lang: String,
    #[arg(long)]
    tgt_lang: String,
    /// Write each bucket's segments to DIR/{src,tgt,other}.txt.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn load_test_set(path: &Path, lines: Option<&Path>) -> Result<TestSet, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("sgm") | Some("sgml") => Ok(load_sgml(path)?),
        _ => {
            let lines = lines.ok_or_else(|| {
                CliError::Usage("a TSV test set needs --lines FILE with the sentences".into())
            })?;
            Ok(load_tsv(path, lines)?)
        }
    }
}

fn cmd_split(args: SplitArgs) -> CliResult {
    let test_set = load_test_set(&args.testset, args.lines.as_deref())?;
    let split = origin::split_by_origin(&test_set, &args.src_lang, &args.tgt_lang);
    for (bucket, indices) in [
        (OriginBucket::Src, &split.src),
        (OriginBucket::Tgt, &split.tgt),
        (OriginBucket::Other, &split.other),
    ] {
        println!("{} {}", bucket.name(), indices.len());
        if let Some(dir) = &args.out_dir {
            std::fs::create_dir_all(dir).map_err(|source| distillery_core::Error::Io {
                path: dir.clone(),
                source,
            })?;
            let mut body = String::new();
            for &i in indices {
                body.push_str(&test_set.segments[i].text);
                body.push('\n');
            }
            let path = dir.join(format!("{}.txt", bucket.name()));
            std::fs::write(&path, body)
                .map_err(|source| distillery_core::Error::Io { path, source })?;
        }
    }
    Ok(())
}

#[derive(Args)]
struct TtrArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

fn cmd_ttr(args: TtrArgs) -> CliResult {
    let lines = read_lines(&args.input)?;
    match origin::type_token_ratio(lines.iter().map(String::as_str)) {
        Some(stats) => {
            println!("types {}", stats.types);
            println!("tokens {}", stats.tokens);
            println!("ratio {:.4}", stats.ratio);
            Ok(())
        }
        None => Err(CliError::Usage(format!(
            "{} contains no tokens",
            args.input.display()
        ))),
    }
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    langs: LangPair,
    #[command(flatten)]
    backend: BackendOpts,
}

fn cmd_probe(args: ProbeArgs) -> CliResult {
    let backend = args
        .backend
        .build(&args.langs.src_lang, &args.langs.tgt_lang)?;
    let answer = backend.probe()?;
    println!("{answer}");
    Ok(())
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Where to write models, datasets, hypotheses, and reports.
    #[arg(long)]
    out_dir: PathBuf,
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    Ok(runner::read_plain_lines(path)?)
}
