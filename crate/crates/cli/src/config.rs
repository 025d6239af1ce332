//! Experiment configuration: the TOML schema for `distillery run`, plus
//! reference validation so a broken config fails before any work starts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use distillery_core::backend::Transport;
use distillery_core::quant::QuantMode;
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Which pipeline construction a `[datasets.*]` block asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetDecl {
    /// The parallel corpus as-is.
    P,
    /// Source kept, target re-translated by the teacher.
    FtP,
    /// Target-language monolingual text back-translated by the reverse model.
    Bt,
    /// Back-translated source translated forward again: both sides synthetic.
    FtBt,
    /// Source-language monolingual text forward-translated by the teacher.
    FtMono,
}

impl DatasetDecl {
    pub fn needs_reverse(self) -> bool {
        matches!(self, DatasetDecl::Bt | DatasetDecl::FtBt)
    }

    /// Whether `from` must name a parallel corpus (else a monolingual one).
    pub fn wants_parallel(self) -> bool {
        matches!(self, DatasetDecl::P | DatasetDecl::FtP)
    }
}

impl fmt::Display for DatasetDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DatasetDecl::P => "p",
            DatasetDecl::FtP => "ft_p",
            DatasetDecl::Bt => "bt",
            DatasetDecl::FtBt => "ft_bt",
            DatasetDecl::FtMono => "ft_mono",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub seed: u64,
    pub src_lang: String,
    pub tgt_lang: String,
    pub corpora: BTreeMap<String, CorpusDecl>,
    #[serde(default)]
    pub clean: Option<CleanDecl>,
    #[serde(default)]
    pub backends: BTreeMap<String, BackendDecl>,
    pub teacher: ModelDecl,
    #[serde(default)]
    pub reverse: Option<ModelDecl>,
    #[serde(default)]
    pub datasets: BTreeMap<String, DatasetBlock>,
    #[serde(default)]
    pub students: BTreeMap<String, StudentDecl>,
    pub evaluation: EvalDecl,
}

/// One corpus: either parallel (`src` + `tgt` files) or monolingual
/// (`text` + `lang`).  Sidecar metadata files are picked up automatically;
/// the optional origin/provenance fields override whole sides in bulk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusDecl {
    pub src: Option<PathBuf>,
    pub tgt: Option<PathBuf>,
    pub text: Option<PathBuf>,
    pub lang: Option<String>,
    pub src_origin: Option<String>,
    pub tgt_origin: Option<String>,
    pub origin: Option<String>,
    pub src_provenance: Option<SideProvenance>,
    pub tgt_provenance: Option<SideProvenance>,
    pub provenance: Option<SideProvenance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideProvenance {
    Natural,
    Human,
}

impl CorpusDecl {
    pub fn is_parallel(&self) -> bool {
        self.src.is_some()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanDecl {
    #[serde(default = "default_min_words")]
    pub min_words: usize,
    #[serde(default = "default_max_words")]
    pub max_words: usize,
    /// Corpus names to clean; everything else passes through untouched.
    pub apply_to: Vec<String>,
}

fn default_min_words() -> usize {
    3
}

fn default_max_words() -> usize {
    150
}

// No deny_unknown_fields here: it cannot be combined with flatten.
#[derive(Debug, Clone, Deserialize)]
pub struct BackendDecl {
    pub src: String,
    pub tgt: String,
    #[serde(flatten)]
    pub transport: Transport,
    pub batch_size: Option<usize>,
}

/// A translation model: either a toy table trained here (`train_on` +
/// `iterations`) or a declared backend (`backend`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDecl {
    pub train_on: Option<String>,
    pub iterations: Option<usize>,
    pub backend: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetBlock {
    pub kind: DatasetDecl,
    pub from: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudentDecl {
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    pub recipe: Vec<RecipeDecl>,
    #[serde(default)]
    pub quantize: Option<QuantizeDecl>,
}

fn default_iterations() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeDecl {
    pub dataset: String,
    pub take: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizeDecl {
    pub mode: QuantMode,
    pub bits: u8,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalDecl {
    /// Plain-text source lines, one per test segment, aligned with `refs`.
    pub source: PathBuf,
    /// Reference test set: SGML (`.sgm`/`.sgml`) or segment TSV.
    pub refs: PathBuf,
    /// Reference sentence file, required when `refs` is a TSV.
    pub ref_lines: Option<PathBuf>,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    pub tokenizer: Option<distillery_core::metrics::Tokenizer>,
    pub smoothing: Option<distillery_core::metrics::Smoothing>,
}

fn default_resamples() -> usize {
    1000
}

/// Parse and validate; all paths come back resolved relative to the
/// config file's directory.
pub fn load(path: &Path) -> Result<(Config, String), String> {
    let raw =
        std::fs::read(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let digest = sha256_hex(&raw);
    let text =
        String::from_utf8(raw).map_err(|_| format!("config {} is not UTF-8", path.display()))?;
    let mut config: Config =
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    resolve_paths(&mut config, base);
    validate(&config)?;
    Ok((config, digest))
}

fn resolve_paths(config: &mut Config, base: &Path) {
    let fix = |p: &mut PathBuf| {
        if p.is_relative() {
            let joined = base.join(p.as_path());
            *p = joined;
        }
    };
    for corpus in config.corpora.values_mut() {
        for p in [&mut corpus.src, &mut corpus.tgt, &mut corpus.text]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
    }
    for backend in config.backends.values_mut() {
        if let Transport::Toy { model } = &mut backend.transport {
            fix(model);
        }
    }
    fix(&mut config.evaluation.source);
    fix(&mut config.evaluation.refs);
    if let Some(p) = &mut config.evaluation.ref_lines {
        fix(p);
    }
}

fn validate(config: &Config) -> Result<(), String> {
    if config.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "schema_version {} not supported (this tool speaks {})",
            config.schema_version, SCHEMA_VERSION
        ));
    }
    if config.corpora.is_empty() {
        return Err("no corpora declared".into());
    }

    for (name, corpus) in &config.corpora {
        let parallel_fields = corpus.src.is_some() && corpus.tgt.is_some();
        let mono_fields = corpus.text.is_some() && corpus.lang.is_some();
        if parallel_fields == mono_fields {
            return Err(format!(
                "corpus {name:?} must set either src+tgt (parallel) or text+lang (monolingual)"
            ));
        }
        if parallel_fields && (corpus.origin.is_some() || corpus.provenance.is_some()) {
            return Err(format!(
                "corpus {name:?}: use src_/tgt_ prefixed origin and provenance on parallel corpora"
            ));
        }
        if mono_fields
            && (corpus.src_origin.is_some()
                || corpus.tgt_origin.is_some()
                || corpus.src_provenance.is_some()
                || corpus.tgt_provenance.is_some())
        {
            return Err(format!(
                "corpus {name:?}: src_/tgt_ prefixed fields only apply to parallel corpora"
            ));
        }
        if mono_fields {
            let lang = corpus.lang.as_deref().unwrap();
            if lang != config.src_lang && lang != config.tgt_lang {
                return Err(format!(
                    "corpus {name:?} is in {lang:?}, which is neither {:?} nor {:?}",
                    config.src_lang, config.tgt_lang
                ));
            }
        }
    }

    if let Some(clean) = &config.clean {
        if clean.min_words < 1 || clean.max_words < clean.min_words {
            return Err("clean: need 1 <= min_words <= max_words".into());
        }
        for name in &clean.apply_to {
            if !config.corpora.contains_key(name) {
                return Err(format!("clean.apply_to references unknown corpus {name:?}"));
            }
        }
    }

    for (id, backend) in &config.backends {
        if backend.src == backend.tgt {
            return Err(format!(
                "backend {id:?} translates {0:?} to {0:?}",
                backend.src
            ));
        }
    }

    check_model(
        "teacher",
        &config.teacher,
        config,
        config.src_lang.as_str(),
        &config.tgt_lang,
    )?;
    let needs_reverse = config.datasets.values().any(|d| d.kind.needs_reverse());
    match (&config.reverse, needs_reverse) {
        (None, true) => {
            return Err("datasets need back-translation but no [reverse] model is declared".into())
        }
        (Some(reverse), _) => check_model(
            "reverse",
            reverse,
            config,
            config.tgt_lang.as_str(),
            &config.src_lang,
        )?,
        (None, false) => {}
    }

    for (name, dataset) in &config.datasets {
        let corpus = config.corpora.get(&dataset.from).ok_or_else(|| {
            format!(
                "dataset {name:?} reads from unknown corpus {:?}",
                dataset.from
            )
        })?;
        if dataset.kind.wants_parallel() != corpus.is_parallel() {
            let want = if dataset.kind.wants_parallel() {
                "parallel"
            } else {
                "monolingual"
            };
            return Err(format!(
                "dataset {name:?} ({}) needs a {want} corpus, but {:?} is not one",
                dataset.kind, dataset.from
            ));
        }
        if !corpus.is_parallel() {
            let lang = corpus.lang.as_deref().unwrap();
            let want = match dataset.kind {
                DatasetDecl::FtMono => &config.src_lang,
                _ => &config.tgt_lang,
            };
            if lang != want {
                return Err(format!(
                    "dataset {name:?} ({}) needs {want:?} text, but corpus {:?} is {lang:?}",
                    dataset.kind, dataset.from
                ));
            }
        }
    }

    if config.students.is_empty() {
        return Err("no students declared; nothing to distill".into());
    }
    for (name, student) in &config.students {
        if student.recipe.is_empty() {
            return Err(format!("student {name:?} has an empty recipe"));
        }
        for part in &student.recipe {
            if !config.datasets.contains_key(&part.dataset) {
                return Err(format!(
                    "student {name:?} references unknown dataset {:?}",
                    part.dataset
                ));
            }
            if part.take == 0 {
                return Err(format!(
                    "student {name:?} takes 0 pairs from {:?}",
                    part.dataset
                ));
            }
        }
        if student.iterations == 0 {
            return Err(format!("student {name:?} trains for 0 iterations"));
        }
        if let Some(q) = &student.quantize {
            if q.bits == 0 || q.bits > 16 {
                return Err(format!("student {name:?}: quantize bits must be 1..=16"));
            }
        }
    }

    let refs = &config.evaluation.refs;
    let is_sgml = matches!(
        refs.extension().and_then(|e| e.to_str()),
        Some("sgm") | Some("sgml")
    );
    if !is_sgml && config.evaluation.ref_lines.is_none() {
        return Err("evaluation.refs is not SGML, so evaluation.ref_lines is required".into());
    }
    if config.evaluation.resamples == 0 {
        return Err("evaluation.resamples must be at least 1".into());
    }
    Ok(())
}

fn check_model(
    which: &str,
    model: &ModelDecl,
    config: &Config,
    src: &str,
    tgt: &str,
) -> Result<(), String> {
    match (&model.train_on, &model.backend) {
        (Some(corpus_name), None) => {
            let corpus = config
                .corpora
                .get(corpus_name)
                .ok_or_else(|| format!("{which} trains on unknown corpus {corpus_name:?}"))?;
            if !corpus.is_parallel() {
                return Err(format!(
                    "{which} trains on {corpus_name:?}, which is not parallel"
                ));
            }
            if model.iterations.unwrap_or(0) == 0 {
                return Err(format!("{which}: training needs iterations >= 1"));
            }
            Ok(())
        }
        (None, Some(backend_id)) => {
            let backend = config
                .backends
                .get(backend_id)
                .ok_or_else(|| format!("{which} references unknown backend {backend_id:?}"))?;
            if backend.src != src || backend.tgt != tgt {
                return Err(format!(
                    "{which} must translate {src:?} to {tgt:?}, but backend {backend_id:?} is {}->{}",
                    backend.src, backend.tgt
                ));
            }
            Ok(())
        }
        _ => Err(format!(
            "{which} must set exactly one of train_on or backend"
        )),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let digest = <sha2::Sha256 as sha2::Digest>::digest(bytes);
    digest.iter().fold(String::new(), |mut acc, b| {
        let _ = write!(acc, "{b:02x}");
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.toml");
        std::fs::write(&path, body).unwrap();
        path
    }

    fn minimal() -> &'static str {
        r#"
            schema_version = 1
            seed = 7
            src_lang = "xx"
            tgt_lang = "yy"

            [corpora.train]
            src = "train.xx.txt"
            tgt = "train.yy.txt"

            [teacher]
            train_on = "train"
            iterations = 5

            [datasets.ft_p]
            kind = "ft_p"
            from = "train"

            [students.s1]
            recipe = [{ dataset = "ft_p", take = 10 }]

            [evaluation]
            source = "test.xx.txt"
            refs = "test.sgm"
        "#
    }

    #[test]
    fn minimal_config_parses_and_resolves_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), minimal());
        let (config, digest) = load(&path).unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(digest.len(), 64);
        // relative paths are anchored at the config file
        assert_eq!(
            config.corpora["train"].src.as_deref(),
            Some(dir.path().join("train.xx.txt").as_path())
        );
        assert_eq!(config.evaluation.resamples, 1000);
    }

    #[test]
    fn unknown_references_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let broken = minimal().replace("from = \"train\"", "from = \"nope\"");
        let path = write_config(dir.path(), &broken);
        let err = load(&path).unwrap_err();
        assert!(err.contains("unknown corpus \"nope\""), "{err}");
    }

    #[test]
    fn bt_without_reverse_model_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = minimal().replace(
            "[datasets.ft_p]\n            kind = \"ft_p\"\n            from = \"train\"",
            "[corpora.mono]\ntext = \"m.yy.txt\"\nlang = \"yy\"\n[datasets.bt]\nkind = \"bt\"\nfrom = \"mono\"",
        );
        let path = write_config(dir.path(), &body);
        let err = load(&path).unwrap_err();
        assert!(err.contains("no [reverse] model"), "{err}");
    }

    #[test]
    fn dataset_corpus_shape_must_match_kind() {
        let dir = tempfile::tempdir().unwrap();
        let body = minimal().replace("kind = \"ft_p\"", "kind = \"ft_mono\"");
        let path = write_config(dir.path(), &body);
        let err = load(&path).unwrap_err();
        assert!(err.contains("needs a monolingual corpus"), "{err}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = minimal().replace("schema_version = 1", "schema_version = 2");
        let path = write_config(dir.path(), &body);
        let err = load(&path).unwrap_err();
        assert!(err.contains("schema_version"), "{err}");
    }

    #[test]
    fn tsv_refs_need_a_lines_file() {
        let dir = tempfile::tempdir().unwrap();
        let body = minimal().replace("refs = \"test.sgm\"", "refs = \"test.tsv\"");
        let path = write_config(dir.path(), &body);
        let err = load(&path).unwrap_err();
        assert!(err.contains("ref_lines"), "{err}");
    }
}
