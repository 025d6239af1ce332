//! The `run` subcommand: one config file in, a full experiment out.
//!
//! Stages execute in dependency order:
//!
//!   load -> clean -> backends -> reverse -> teacher -> datasets
//!        -> students -> quantize -> translate -> evaluate -> bootstrap
//!        -> report
//!
//! Everything is a deterministic function of (config bytes, input files,
//! seed): corpora iterate in name order, every random choice gets a seed
//! derived from the stage label, and reports serialize through sorted
//! maps.  Rerunning with the same inputs reproduces every artifact
//! byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use distillery_core::backend::{Backend, BackendSpec, DEFAULT_BATCH_SIZE};
use distillery_core::corpus::{
    load_mono, load_parallel, save_parallel, MonoCorpus, ParallelCorpus, Provenance,
};
use distillery_core::metrics::{
    paired_bootstrap, BootstrapMetric, BootstrapResult, DEFAULT_BETA, DEFAULT_MAX_N,
    DEFAULT_MAX_SHIFT_DIST,
};
use distillery_core::origin::{self, load_sgml, load_tsv, EvalParams, OriginReport, TestSet};
use distillery_core::pipeline::{self, ManifestEntry, RecipePart};
use distillery_core::quant::{self, QuantStats, SizeReport};
use distillery_core::toymt::{train_ibm1, LexTable};
use distillery_core::{Error, Result};
use serde::Serialize;
use sha2::Digest;

use crate::config::{Config, DatasetDecl, ModelDecl, SideProvenance};
use crate::CliError;

/// Seed for one named stage: the label keys the derivation, so adding or
/// reordering stages never disturbs the randomness of existing ones.
pub fn stage_seed(global: u64, label: &str) -> u64 {
    let digest = sha2::Sha256::digest(label.as_bytes());
    let keyed = u64::from_le_bytes(digest[..8].try_into().unwrap());
    splitmix64(global ^ keyed)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn run(config_path: &Path, out_dir: &Path) -> std::result::Result<(), CliError> {
    let (config, digest) = crate::config::load(config_path).map_err(CliError::Usage)?;
    Runner::new(config, digest, out_dir.to_path_buf()).execute()
}

enum Corpus {
    Parallel(ParallelCorpus),
    Mono(MonoCorpus),
}

/// A system that can translate test text: an in-process table or a
/// declared external backend.
enum Translator {
    Table(LexTable),
    Named(String),
}

struct Runner {
    config: Config,
    config_digest: String,
    out_dir: PathBuf,
    completed: Vec<String>,

    corpora: BTreeMap<String, Corpus>,
    loaded_sizes: BTreeMap<String, usize>,
    backends: BTreeMap<String, Backend>,
    teacher: Option<Backend>,
    reverse: Option<Backend>,
    /// Tables trained in-process, kept for direct decoding and reports.
    toy_tables: BTreeMap<String, LexTable>,
    model_info: BTreeMap<String, ModelInfo>,
    datasets: BTreeMap<String, DatasetInfo>,
    students: BTreeMap<String, StudentInfo>,
    quantized: BTreeMap<String, QuantInfo>,
    test_set: Option<TestSet>,
    hyps: BTreeMap<String, Vec<String>>,
    scores: BTreeMap<String, OriginReport>,
    bootstrap: Vec<BootstrapRecord>,
}

#[derive(Serialize)]
struct ModelInfo {
    entries: usize,
    source_vocab: usize,
    target_vocab: usize,
    iterations: usize,
    log_likelihood: Vec<f64>,
}

struct DatasetInfo {
    kind: DatasetDecl,
    corpus: ParallelCorpus,
    lineage: BTreeMap<String, usize>,
}

struct StudentInfo {
    table: LexTable,
    manifest: Vec<ManifestEntry>,
    pairs: usize,
    digest: String,
}

#[derive(Serialize)]
struct QuantInfo {
    student: String,
    stats: QuantStats,
    size: SizeReport,
    #[serde(skip)]
    table: LexTable,
}

#[derive(Serialize)]
struct BootstrapRecord {
    system_a: String,
    system_b: String,
    #[serde(flatten)]
    result: BootstrapResult,
}

impl Runner {
    fn new(config: Config, config_digest: String, out_dir: PathBuf) -> Runner {
        Runner {
            config,
            config_digest,
            out_dir,
            completed: Vec::new(),
            corpora: BTreeMap::new(),
            loaded_sizes: BTreeMap::new(),
            backends: BTreeMap::new(),
            teacher: None,
            reverse: None,
            toy_tables: BTreeMap::new(),
            model_info: BTreeMap::new(),
            datasets: BTreeMap::new(),
            students: BTreeMap::new(),
            quantized: BTreeMap::new(),
            test_set: None,
            hyps: BTreeMap::new(),
            scores: BTreeMap::new(),
            bootstrap: Vec::new(),
        }
    }

    fn execute(mut self) -> std::result::Result<(), CliError> {
        self.write_file(
            "run.json",
            &(to_json_line(&serde_json::json!({
                "tool": "distillery",
                "version": env!("CARGO_PKG_VERSION"),
                "config_digest": self.config_digest,
                "seed": self.config.seed,
            }))),
        )
        .map_err(CliError::Core)?;

        self.stage("load", Self::load_corpora)?;
        self.stage("clean", Self::clean_corpora)?;
        self.stage("backends", Self::prepare_backends)?;
        self.stage("reverse", Self::prepare_reverse)?;
        self.stage("teacher", Self::prepare_teacher)?;
        self.stage("datasets", Self::build_datasets)?;
        self.stage("students", Self::train_students)?;
        self.stage("quantize", Self::quantize_students)?;
        self.stage("translate", Self::translate_test)?;
        self.stage("evaluate", Self::evaluate)?;
        self.stage("bootstrap", Self::run_bootstrap)?;
        self.stage("report", Self::write_reports)?;
        Ok(())
    }

    fn stage(
        &mut self,
        name: &str,
        f: fn(&mut Self) -> Result<()>,
    ) -> std::result::Result<(), CliError> {
        log::info!("stage {name}");
        match f(self) {
            Ok(()) => {
                self.completed.push(name.to_string());
                let progress = to_json_line(&serde_json::json!({ "completed": self.completed }));
                self.write_file("progress.json", &progress)
                    .map_err(CliError::Core)?;
                Ok(())
            }
            Err(source) => Err(CliError::Stage {
                stage: name.to_string(),
                completed: self.completed.clone(),
                source,
            }),
        }
    }

    // ----- stages ---------------------------------------------------

    fn load_corpora(&mut self) -> Result<()> {
        let src_lang = self.config.src_lang.clone();
        let tgt_lang = self.config.tgt_lang.clone();
        for (name, decl) in &self.config.corpora {
            let corpus = if decl.is_parallel() {
                let mut c = load_parallel(
                    decl.src.as_deref().unwrap(),
                    decl.tgt.as_deref().unwrap(),
                    &src_lang,
                    &tgt_lang,
                )?;
                for pair in &mut c.pairs {
                    apply_overrides(&mut pair.src, &decl.src_origin, &decl.src_provenance);
                    apply_overrides(&mut pair.tgt, &decl.tgt_origin, &decl.tgt_provenance);
                }
                self.loaded_sizes.insert(name.clone(), c.len());
                Corpus::Parallel(c)
            } else {
                let mut m =
                    load_mono(decl.text.as_deref().unwrap(), decl.lang.as_deref().unwrap())?;
                for record in &mut m.records {
                    apply_overrides(record, &decl.origin, &decl.provenance);
                }
                self.loaded_sizes.insert(name.clone(), m.len());
                Corpus::Mono(m)
            };
            self.corpora.insert(name.clone(), corpus);
        }
        Ok(())
    }

    fn clean_corpora(&mut self) -> Result<()> {
        let Some(clean) = self.config.clean.clone() else {
            return Ok(());
        };
        for name in &clean.apply_to {
            let corpus = self.corpora.get_mut(name).expect("validated");
            match corpus {
                Corpus::Parallel(c) => *c = c.clean(clean.min_words, clean.max_words)?,
                Corpus::Mono(m) => *m = m.clean(clean.min_words, clean.max_words)?,
            }
        }
        Ok(())
    }

    fn prepare_backends(&mut self) -> Result<()> {
        for (id, decl) in &self.config.backends {
            let backend = Backend::new(BackendSpec {
                id: id.clone(),
                src: decl.src.clone(),
                tgt: decl.tgt.clone(),
                transport: decl.transport.clone(),
                batch_size: decl.batch_size.unwrap_or(DEFAULT_BATCH_SIZE),
            })?;
            let echo = backend.probe()?;
            log::debug!("backend {id} probe answered {echo:?}");
            self.backends.insert(id.clone(), backend);
        }
        Ok(())
    }

    fn prepare_reverse(&mut self) -> Result<()> {
        let Some(decl) = self.config.reverse.clone() else {
            return Ok(());
        };
        let src = self.config.tgt_lang.clone();
        let tgt = self.config.src_lang.clone();
        self.reverse = Some(self.prepare_model("reverse", &decl, &src, &tgt)?);
        Ok(())
    }

    fn prepare_teacher(&mut self) -> Result<()> {
        let decl = self.config.teacher.clone();
        let src = self.config.src_lang.clone();
        let tgt = self.config.tgt_lang.clone();
        self.teacher = Some(self.prepare_model("teacher", &decl, &src, &tgt)?);
        Ok(())
    }

    /// Train a toy model (on the swapped corpus for the reverse direction)
    /// or wrap a declared backend.
    fn prepare_model(
        &mut self,
        which: &str,
        decl: &ModelDecl,
        src: &str,
        tgt: &str,
    ) -> Result<Backend> {
        if let Some(backend_id) = &decl.backend {
            let spec = self
                .backends
                .get(backend_id)
                .expect("validated")
                .spec()
                .clone();
            // The runner owns its copy; construction re-validates it.
            return Backend::new(spec);
        }
        let corpus_name = decl.train_on.as_deref().expect("validated");
        let base = match self.corpora.get(corpus_name).expect("validated") {
            Corpus::Parallel(c) => c,
            Corpus::Mono(_) => unreachable!("validated"),
        };
        let oriented = if base.src_lang == src {
            base.clone()
        } else {
            base.swapped()
        };
        let iterations = decl.iterations.expect("validated");
        let (table, ll) = train_ibm1(&oriented, iterations)?;
        self.write_file(&format!("models/{which}.tsv"), table.to_tsv().as_bytes())?;
        self.toy_tables.insert(which.to_string(), table.clone());
        self.model_info.insert(
            which.to_string(),
            ModelInfo {
                entries: table.entry_count(),
                source_vocab: table.source_vocab(),
                target_vocab: table.target_vocab(),
                iterations,
                log_likelihood: ll,
            },
        );
        Ok(Backend::from_table(which, src, tgt, table))
    }

    fn build_datasets(&mut self) -> Result<()> {
        let mut built = BTreeMap::new();
        for (name, block) in &self.config.datasets {
            let from = self.corpora.get(&block.from).expect("validated");
            let corpus = match (block.kind, from) {
                (DatasetDecl::P, Corpus::Parallel(c)) => c.clone(),
                (DatasetDecl::FtP, Corpus::Parallel(c)) => {
                    pipeline::distill_parallel(c, self.teacher.as_ref().expect("validated"))?
                }
                (DatasetDecl::Bt, Corpus::Mono(m)) => {
                    pipeline::back_translate(m, self.reverse.as_ref().expect("validated"))?
                }
                (DatasetDecl::FtBt, Corpus::Mono(m)) => pipeline::round_trip(
                    m,
                    self.reverse.as_ref().expect("validated"),
                    self.teacher.as_ref().expect("validated"),
                )?,
                (DatasetDecl::FtMono, Corpus::Mono(m)) => {
                    pipeline::forward_translate_mono(m, self.teacher.as_ref().expect("validated"))?
                }
                _ => unreachable!("config validation matches corpus shapes to kinds"),
            };
            let lineage = pipeline::classify_corpus(&corpus)
                .into_iter()
                .map(|(kind, count)| (kind.id().to_string(), count))
                .collect();
            built.insert(
                name.clone(),
                DatasetInfo {
                    kind: block.kind,
                    corpus,
                    lineage,
                },
            );
        }
        for (name, info) in &built {
            self.save_pair_files("data", name, &info.corpus)?;
        }
        self.datasets = built;
        Ok(())
    }

    fn train_students(&mut self) -> Result<()> {
        let mut trained = BTreeMap::new();
        for (name, decl) in &self.config.students {
            let parts: Vec<RecipePart> = decl
                .recipe
                .iter()
                .enumerate()
                .map(|(i, part)| RecipePart {
                    name: part.dataset.clone(),
                    corpus: self.datasets[&part.dataset].corpus.clone(),
                    take: part.take,
                    seed: stage_seed(
                        self.config.seed,
                        &format!("students/{name}/{i}/{}", part.dataset),
                    ),
                })
                .collect();
            let (composed, manifest) = pipeline::compose(&parts)?;
            let (table, ll) = train_ibm1(&composed, decl.iterations)?;
            self.model_info.insert(
                format!("student-{name}"),
                ModelInfo {
                    entries: table.entry_count(),
                    source_vocab: table.source_vocab(),
                    target_vocab: table.target_vocab(),
                    iterations: decl.iterations,
                    log_likelihood: ll,
                },
            );
            trained.insert(
                name.clone(),
                StudentInfo {
                    table,
                    manifest,
                    pairs: composed.len(),
                    digest: composed.digest(),
                },
            );
            self.save_pair_files("students", name, &composed)?;
        }
        for (name, info) in &trained {
            self.write_file(
                &format!("students/{name}.manifest.json"),
                &to_json_line(&info.manifest),
            )?;
            self.write_file(
                &format!("models/student-{name}.tsv"),
                info.table.to_tsv().as_bytes(),
            )?;
        }
        self.students = trained;
        Ok(())
    }

    fn quantize_students(&mut self) -> Result<()> {
        let mut packed = BTreeMap::new();
        for (name, decl) in &self.config.students {
            let Some(q) = &decl.quantize else { continue };
            let table = &self.students[name].table;
            let (qtable, stats) = quant::quantize(table, q.mode, q.bits)?;
            let size = quant::size_report(table, q.mode, q.bits)?;
            let file = format!("models/student-{name}.{}{}.lxq", q.mode.name(), q.bits);
            let bytes = quant::to_packed_bytes(&qtable, q.mode, q.bits)?;
            self.write_file(&file, &bytes)?;
            packed.insert(
                format!("{name}-q{}{}", q.bits, q.mode.name()),
                QuantInfo {
                    student: name.clone(),
                    stats,
                    size,
                    table: qtable,
                },
            );
        }
        self.quantized = packed;
        Ok(())
    }

    fn translate_test(&mut self) -> Result<()> {
        let eval = &self.config.evaluation;
        let test_set = match eval.refs.extension().and_then(|e| e.to_str()) {
            Some("sgm") | Some("sgml") => load_sgml(&eval.refs)?,
            _ => load_tsv(&eval.refs, eval.ref_lines.as_deref().expect("validated"))?,
        };
        let sources = read_plain_lines(&eval.source)?;
        if sources.len() != test_set.len() {
            return Err(Error::LengthMismatch {
                left: sources.len(),
                right: test_set.len(),
            });
        }

        let mut systems: BTreeMap<String, Translator> = BTreeMap::new();
        let teacher = match &self.config.teacher.backend {
            Some(id) => Translator::Named(id.clone()),
            None => Translator::Table(self.toy_tables["teacher"].clone()),
        };
        systems.insert("teacher".into(), teacher);
        for (name, info) in &self.students {
            systems.insert(name.clone(), Translator::Table(info.table.clone()));
        }
        for (name, info) in &self.quantized {
            systems.insert(name.clone(), Translator::Table(info.table.clone()));
        }

        let mut hyps = BTreeMap::new();
        for (system, translator) in &systems {
            let outputs = match translator {
                Translator::Table(table) => {
                    sources.iter().map(|s| table.decode(s)).collect::<Vec<_>>()
                }
                Translator::Named(id) => self.backends[id].translate(&sources)?,
            };
            let mut body = outputs.join("\n");
            body.push('\n');
            self.write_file(&format!("hyps/{system}.txt"), body.as_bytes())?;
            hyps.insert(system.clone(), outputs);
        }
        self.test_set = Some(test_set);
        self.hyps = hyps;
        Ok(())
    }

    fn evaluate(&mut self) -> Result<()> {
        let params = self.eval_params();
        let test_set = self.test_set.as_ref().expect("set by translate stage");
        for (system, hyps) in &self.hyps {
            let report = origin::evaluate_by_origin(
                test_set,
                hyps,
                &self.config.src_lang,
                &self.config.tgt_lang,
                &params,
            )?;
            self.scores.insert(system.clone(), report);
        }
        Ok(())
    }

    fn run_bootstrap(&mut self) -> Result<()> {
        let params = self.eval_params();
        let refs = self
            .test_set
            .as_ref()
            .expect("set by translate stage")
            .texts();
        let resamples = self.config.evaluation.resamples;
        let metrics = [
            BootstrapMetric::Bleu {
                tokenizer: params.tokenizer,
                smoothing: params.smoothing,
            },
            BootstrapMetric::Chrf {
                max_n: params.chrf_max_n,
                beta: params.chrf_beta,
            },
            BootstrapMetric::Ter {
                max_shift_dist: params.ter_shift_dist,
            },
        ];
        let names: Vec<&String> = self.hyps.keys().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                for metric in metrics.iter().copied() {
                    let seed = stage_seed(
                        self.config.seed,
                        &format!("bootstrap/{}/{a}/{b}", metric.name()),
                    );
                    let result = paired_bootstrap(
                        metric,
                        &self.hyps[*a],
                        &self.hyps[*b],
                        &refs,
                        resamples,
                        seed,
                    )?;
                    self.bootstrap.push(BootstrapRecord {
                        system_a: (*a).clone(),
                        system_b: (*b).clone(),
                        result,
                    });
                }
            }
        }
        Ok(())
    }

    fn write_reports(&mut self) -> Result<()> {
        let jsonl = self.render_jsonl();
        self.write_file("report.jsonl", jsonl.as_bytes())?;
        let table = self.render_table();
        self.write_file("report.txt", table.as_bytes())?;
        Ok(())
    }

    // ----- rendering ------------------------------------------------

    fn render_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |value: serde_json::Value| {
            out.push_str(&serde_json::to_string(&value).expect("serializable"));
            out.push('\n');
        };

        push(serde_json::json!({
            "record": "meta",
            "tool": "distillery",
            "version": env!("CARGO_PKG_VERSION"),
            "config_digest": self.config_digest,
            "seed": self.config.seed,
            "src_lang": self.config.src_lang,
            "tgt_lang": self.config.tgt_lang,
        }));

        for (name, corpus) in &self.corpora {
            let (shape, size, digest) = match corpus {
                Corpus::Parallel(c) => ("parallel", c.len(), c.digest()),
                Corpus::Mono(m) => ("mono", m.len(), m.digest()),
            };
            push(serde_json::json!({
                "record": "corpus",
                "name": name,
                "shape": shape,
                "loaded": self.loaded_sizes[name],
                "size": size,
                "digest": digest,
            }));
        }

        for (name, info) in &self.datasets {
            push(serde_json::json!({
                "record": "dataset",
                "name": name,
                "kind": info.kind.to_string(),
                "pairs": info.corpus.len(),
                "digest": info.corpus.digest(),
                "lineage": info.lineage,
            }));
        }

        for (name, info) in &self.model_info {
            push(serde_json::json!({ "record": "model", "name": name, "info": info }));
        }

        for (name, info) in &self.students {
            push(serde_json::json!({
                "record": "student",
                "name": name,
                "pairs": info.pairs,
                "digest": info.digest,
                "manifest": info.manifest,
            }));
        }

        for (name, info) in &self.quantized {
            push(serde_json::json!({ "record": "quantized", "system": name, "info": info }));
        }

        for (system, report) in &self.scores {
            push(serde_json::json!({
                "record": "scores",
                "system": system,
                "report": report,
            }));
        }

        for record in &self.bootstrap {
            push(serde_json::json!({ "record": "bootstrap", "test": record }));
        }

        for (system, report) in &self.scores {
            for (bucket, scores) in &report.buckets {
                push(serde_json::json!({
                    "record": "ttr",
                    "system": system,
                    "bucket": bucket,
                    "hyp_ttr": scores.hyp_ttr,
                    "ref_ttr": scores.ref_ttr,
                }));
            }
        }
        out
    }

    fn render_table(&self) -> String {
        let mut t = String::new();
        let _ = writeln!(t, "experiment report");
        let _ = writeln!(t, "config digest  {}", self.config_digest);
        let _ = writeln!(
            t,
            "languages      {} -> {}   seed {}",
            self.config.src_lang, self.config.tgt_lang, self.config.seed
        );

        let _ = writeln!(t, "\ndatasets");
        let _ = writeln!(t, "  {:<12} {:<8} {:>7}  lineage", "name", "kind", "pairs");
        for (name, info) in &self.datasets {
            let lineage = info
                .lineage
                .iter()
                .map(|(k, n)| format!("{k}:{n}"))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                t,
                "  {:<12} {:<8} {:>7}  {}",
                name,
                info.kind.to_string(),
                info.corpus.len(),
                lineage
            );
        }

        let _ = writeln!(t, "\nstudents");
        for (name, info) in &self.students {
            let recipe = info
                .manifest
                .iter()
                .map(|m| format!("{}:{}", m.dataset, m.taken))
                .collect::<Vec<_>>()
                .join(" + ");
            let _ = writeln!(t, "  {:<12} {:>7} pairs  ({recipe})", name, info.pairs);
        }

        let _ = writeln!(t, "\nscores");
        let _ = writeln!(
            t,
            "  {:<16} {:<6} {:>5} {:>8} {:>8} {:>7} {:>7} {:>7}",
            "system", "bucket", "segs", "BLEU", "chrF", "TER", "hypTTR", "refTTR"
        );
        for (system, report) in &self.scores {
            for (bucket, s) in &report.buckets {
                let _ = writeln!(
                    t,
                    "  {:<16} {:<6} {:>5} {:>8.2} {:>8.2} {:>7.3} {:>7.3} {:>7.3}",
                    system, bucket, s.segments, s.bleu, s.chrf, s.ter, s.hyp_ttr, s.ref_ttr
                );
            }
        }

        let _ = writeln!(
            t,
            "\npaired bootstrap ({} resamples)",
            self.config.evaluation.resamples
        );
        let _ = writeln!(
            t,
            "  {:<6} {:<16} {:<16} {:>8} {:>8} {:>7}",
            "metric", "system A", "system B", "A", "B", "p"
        );
        for r in &self.bootstrap {
            let _ = writeln!(
                t,
                "  {:<6} {:<16} {:<16} {:>8.2} {:>8.2} {:>7.3}",
                r.result.metric,
                r.system_a,
                r.system_b,
                r.result.score_a,
                r.result.score_b,
                r.result.p_value
            );
        }
        t
    }

    // ----- helpers --------------------------------------------------

    fn eval_params(&self) -> EvalParams {
        EvalParams {
            tokenizer: self.config.evaluation.tokenizer.unwrap_or_default(),
            smoothing: self.config.evaluation.smoothing.unwrap_or_default(),
            chrf_max_n: DEFAULT_MAX_N,
            chrf_beta: DEFAULT_BETA,
            ter_shift_dist: DEFAULT_MAX_SHIFT_DIST,
        }
    }

    fn save_pair_files(&self, dir: &str, name: &str, corpus: &ParallelCorpus) -> Result<()> {
        let base = self.out_dir.join(dir);
        std::fs::create_dir_all(&base).map_err(|source| Error::Io {
            path: base.clone(),
            source,
        })?;
        let src = base.join(format!("{name}.{}.txt", corpus.src_lang));
        let tgt = base.join(format!("{name}.{}.txt", corpus.tgt_lang));
        save_parallel(corpus, &src, &tgt)
    }

    fn write_file(&self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out_dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        std::fs::write(&path, bytes).map_err(|source| Error::Io { path, source })
    }
}

fn apply_overrides(
    record: &mut distillery_core::corpus::SideRecord,
    origin: &Option<String>,
    provenance: &Option<SideProvenance>,
) {
    if let Some(origin) = origin {
        record.origin_lang = origin.clone();
    }
    match provenance {
        Some(SideProvenance::Natural) => record.provenance = Provenance::natural(),
        Some(SideProvenance::Human) => record.provenance = Provenance::human(),
        None => {}
    }
}

pub(crate) fn read_plain_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let trimmed = text.strip_suffix('\n').unwrap_or(&text);
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    Ok(trimmed
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect())
}

fn to_json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}
