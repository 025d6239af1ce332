//! Dataset constructions for distillation experiments, with lineage
//! tracking.
//!
//! Five kinds of parallel training data, distinguished purely by the
//! provenance signatures of their two sides:
//!
//! | kind       | source side          | target side          |
//! |------------|----------------------|----------------------|
//! | `P`        | natural/human, d0    | natural/human, d0    |
//! | `BT`       | machine, d1          | natural/human, d0    |
//! | `FT(P)`    | natural/human, d0    | machine, d1          |
//! | `FT(Mono)` | natural, d0, own lang| machine, d1          |
//! | `FT(BT)`   | machine, d1          | machine, d2          |
//!
//! `FT(BT)` is the round-trip construction — target-language text is
//! back-translated and the synthetic source is translated forward again
//! — so both sides are machine output and no human-written text remains.
//!
//! Note that `FT(P)` and `FT(Mono)` genuinely coincide when the parallel
//! corpus being distilled has natively-authored source text: forward
//! translation only sees the source side, so the classifier reports such
//! pairs as `FT(Mono)`.  Real parallel corpora carry `human` provenance
//! or a target-side origin on at least one side, which keeps the two
//! apart.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::corpus::{MonoCorpus, PairRecord, ParallelCorpus, SideRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    P,
    Bt,
    FtP,
    FtMono,
    FtBt,
}

impl DatasetKind {
    /// Human-facing label, as used in result tables.
    pub fn label(&self) -> &'static str {
        match self {
            DatasetKind::P => "P",
            DatasetKind::Bt => "BT",
            DatasetKind::FtP => "FT(P)",
            DatasetKind::FtMono => "FT(Mono)",
            DatasetKind::FtBt => "FT(BT)",
        }
    }

    /// Stable identifier, as used in manifests and file names.
    pub fn id(&self) -> &'static str {
        match self {
            DatasetKind::P => "p",
            DatasetKind::Bt => "bt",
            DatasetKind::FtP => "ft_p",
            DatasetKind::FtMono => "ft_mono",
            DatasetKind::FtBt => "ft_bt",
        }
    }
}

impl std::fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn check_direction(backend: &Backend, from: &str, to: Option<&str>) -> Result<()> {
    let spec = backend.spec();
    if spec.src != from {
        return Err(Error::LangMismatch {
            expected: from.to_string(),
            found: spec.src.clone(),
            context: format!("backend {} source language", spec.id),
        });
    }
    if let Some(to) = to {
        if spec.tgt != to {
            return Err(Error::LangMismatch {
                expected: to.to_string(),
                found: spec.tgt.clone(),
                context: format!("backend {} target language", spec.id),
            });
        }
    }
    Ok(())
}

/// Translate a monolingual corpus.  Origin languages are untouched —
/// translation changes the surface language, not where the content came
/// from — while provenance gains one machine pass.
pub fn translate_mono(mono: &MonoCorpus, backend: &Backend) -> Result<MonoCorpus> {
    check_direction(backend, &mono.lang, None)?;
    let texts: Vec<String> = mono.texts().map(str::to_string).collect();
    let outputs = backend.translate(&texts)?;
    Ok(MonoCorpus {
        lang: backend.spec().tgt.clone(),
        records: mono
            .records
            .iter()
            .zip(outputs)
            .map(|(r, text)| SideRecord {
                text,
                origin_lang: r.origin_lang.clone(),
                provenance: r.provenance.translated_by(backend.id()),
            })
            .collect(),
    })
}

/// Back-translation: pair target-language text with machine translations
/// of it *into* the source language, produced by a reverse-direction
/// backend.  The natural text ends up on the target side, which is what
/// makes BT useful: the side the downstream model learns to produce is
/// human quality.
pub fn back_translate(mono_tgt: &MonoCorpus, reverse: &Backend) -> Result<ParallelCorpus> {
    let synthetic = translate_mono(mono_tgt, reverse)?;
    Ok(ParallelCorpus {
        src_lang: synthetic.lang.clone(),
        tgt_lang: mono_tgt.lang.clone(),
        pairs: synthetic
            .records
            .into_iter()
            .zip(&mono_tgt.records)
            .map(|(src, tgt)| PairRecord {
                src,
                tgt: tgt.clone(),
            })
            .collect(),
    })
}

/// Forward translation of a parallel corpus (sequence-level distillation):
/// keep the source side, replace the target side with the backend's
/// output on the source.
pub fn distill_parallel(parallel: &ParallelCorpus, teacher: &Backend) -> Result<ParallelCorpus> {
    check_direction(teacher, &parallel.src_lang, Some(&parallel.tgt_lang))?;
    let src_mono = MonoCorpus {
        lang: parallel.src_lang.clone(),
        records: parallel.pairs.iter().map(|p| p.src.clone()).collect(),
    };
    let synthetic = translate_mono(&src_mono, teacher)?;
    Ok(ParallelCorpus {
        src_lang: parallel.src_lang.clone(),
        tgt_lang: parallel.tgt_lang.clone(),
        pairs: parallel
            .pairs
            .iter()
            .zip(synthetic.records)
            .map(|(p, tgt)| PairRecord {
                src: p.src.clone(),
                tgt,
            })
            .collect(),
    })
}

/// Forward translation of source-language monolingual text.
pub fn forward_translate_mono(mono_src: &MonoCorpus, teacher: &Backend) -> Result<ParallelCorpus> {
    let synthetic = translate_mono(mono_src, teacher)?;
    Ok(ParallelCorpus {
        src_lang: mono_src.lang.clone(),
        tgt_lang: synthetic.lang.clone(),
        pairs: mono_src
            .records
            .iter()
            .zip(synthetic.records)
            .map(|(src, tgt)| PairRecord {
                src: src.clone(),
                tgt,
            })
            .collect(),
    })
}

/// The round-trip construction: back-translate target-language text,
/// then translate the synthetic source forward again.  Both sides are
/// machine output (depths 1 and 2) and the original text appears nowhere.
pub fn round_trip(
    mono_tgt: &MonoCorpus,
    reverse: &Backend,
    teacher: &Backend,
) -> Result<ParallelCorpus> {
    let bt = back_translate(mono_tgt, reverse)?;
    distill_parallel(&bt, teacher)
}

/// Classify one pair by its provenance signature.  `src_lang` is the
/// corpus source language, needed to tell `FT(Mono)` (source-origin
/// text forward-translated) from `FT(P)`.
pub fn classify_pair(pair: &PairRecord, src_lang: &str) -> DatasetKind {
    let src_m = pair.src.provenance.is_machine();
    let tgt_m = pair.tgt.provenance.is_machine();
    match (src_m, tgt_m) {
        (true, true) => DatasetKind::FtBt,
        (true, false) => DatasetKind::Bt,
        (false, true) => {
            let native_src = pair.src.provenance.kind == crate::corpus::ProvenanceKind::Natural
                && pair.src.origin_lang == src_lang
                && pair.tgt.origin_lang == src_lang;
            if native_src {
                DatasetKind::FtMono
            } else {
                DatasetKind::FtP
            }
        }
        (false, false) => DatasetKind::P,
    }
}

/// Pair counts per kind, for lineage audits.
pub fn classify_corpus(corpus: &ParallelCorpus) -> BTreeMap<DatasetKind, usize> {
    let mut counts = BTreeMap::new();
    for pair in &corpus.pairs {
        *counts
            .entry(classify_pair(pair, &corpus.src_lang))
            .or_insert(0) += 1;
    }
    counts
}

/// The single kind of a corpus, as a manifest string; "mixed" when the
/// pairs disagree, "empty" when there are none.
pub fn corpus_kind(corpus: &ParallelCorpus) -> String {
    let counts = classify_corpus(corpus);
    match counts.len() {
        0 => "empty".to_string(),
        1 => counts.keys().next().unwrap().id().to_string(),
        _ => "mixed".to_string(),
    }
}

/// One ingredient of a composed training set.
pub struct RecipePart {
    /// Name for the manifest (e.g. "bt" or "p-oversampled").
    pub name: String,
    pub corpus: ParallelCorpus,
    /// Exact number of pairs to contribute: fewer than available means an
    /// order-preserving sample, more means oversampling.
    pub take: usize,
    pub seed: u64,
}

/// What actually went into a composed dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestEntry {
    pub dataset: String,
    pub kind: String,
    pub taken: usize,
    pub available: usize,
    pub seed: u64,
    pub source_digest: String,
}

/// Concatenate the parts in recipe order, sampling or oversampling each
/// to its exact budget first.
pub fn compose(parts: &[RecipePart]) -> Result<(ParallelCorpus, Vec<ManifestEntry>)> {
    if parts.is_empty() {
        return Err(Error::InvalidArg("recipe has no parts".into()));
    }
    let mut sized = Vec::with_capacity(parts.len());
    let mut manifest = Vec::with_capacity(parts.len());
    for part in parts {
        let available = part.corpus.len();
        let taken = match part.take.cmp(&available) {
            std::cmp::Ordering::Less => part.corpus.sample(part.take, part.seed)?,
            std::cmp::Ordering::Equal => part.corpus.clone(),
            std::cmp::Ordering::Greater => part.corpus.oversample(part.take, part.seed)?,
        };
        manifest.push(ManifestEntry {
            dataset: part.name.clone(),
            kind: corpus_kind(&part.corpus),
            taken: part.take,
            available,
            seed: part.seed,
            source_digest: part.corpus.digest(),
        });
        sized.push(taken);
    }
    let combined = ParallelCorpus::concat(&sized)?;
    Ok((combined, manifest))
}
