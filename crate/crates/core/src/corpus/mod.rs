//! Corpora with per-sentence provenance.
//!
//! Every sentence carries its origin language (the language the content
//! was originally authored in, which translation does *not* change) and a
//! provenance record (how the surface text came to be: written by a
//! native speaker, translated by a human, or produced by a machine).
//! Machine output additionally tracks how many translation passes it went
//! through, so round-trip synthetic data is distinguishable from
//! single-pass synthetic data.

mod io;

pub use io::{load_mono, load_parallel, save_mono, save_parallel, sidecar_path};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Number of whitespace-separated tokens in a sentence.
pub fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

/// How a piece of text came to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceKind {
    /// Authored in this language by a person.
    Natural,
    /// Translated into this language by a person.
    Human,
    /// Produced by a machine translation system.
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: ProvenanceKind,
    /// Number of machine translation passes behind this text.  Zero for
    /// natural and human text, at least one for machine output.
    pub depth: u32,
    /// Identifier of the system that produced machine output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<String>,
}

impl Provenance {
    pub fn natural() -> Self {
        Provenance {
            kind: ProvenanceKind::Natural,
            depth: 0,
            producer: None,
        }
    }

    pub fn human() -> Self {
        Provenance {
            kind: ProvenanceKind::Human,
            depth: 0,
            producer: None,
        }
    }

    /// Provenance of the output of one machine translation pass over text
    /// with this provenance.
    pub fn translated_by(&self, producer: &str) -> Self {
        Provenance {
            kind: ProvenanceKind::Machine,
            depth: self.depth + 1,
            producer: Some(producer.to_string()),
        }
    }

    pub fn is_machine(&self) -> bool {
        self.kind == ProvenanceKind::Machine
    }
}

/// One sentence on one side of a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SideRecord {
    pub text: String,
    /// Language the content was originally authored in.  Invariant under
    /// translation: an English sentence machine-translated to German
    /// still has origin "en".
    pub origin_lang: String,
    pub provenance: Provenance,
}

impl SideRecord {
    pub fn natural(text: impl Into<String>, origin_lang: impl Into<String>) -> Self {
        SideRecord {
            text: text.into(),
            origin_lang: origin_lang.into(),
            provenance: Provenance::natural(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub src: SideRecord,
    pub tgt: SideRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonoCorpus {
    pub lang: String,
    pub records: Vec<SideRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelCorpus {
    pub src_lang: String,
    pub tgt_lang: String,
    pub pairs: Vec<PairRecord>,
}

impl MonoCorpus {
    pub fn new(lang: impl Into<String>) -> Self {
        MonoCorpus {
            lang: lang.into(),
            records: Vec::new(),
        }
    }

    /// Build from raw lines, assuming natively authored text.
    pub fn from_lines<I, S>(lang: &str, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MonoCorpus {
            lang: lang.to_string(),
            records: lines
                .into_iter()
                .map(|l| SideRecord::natural(l, lang))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.text.as_str())
    }

    /// Keep sentences whose whitespace word count lies in
    /// `min_words..=max_words`.
    pub fn clean(&self, min_words: usize, max_words: usize) -> Result<MonoCorpus> {
        check_bounds(min_words, max_words)?;
        Ok(MonoCorpus {
            lang: self.lang.clone(),
            records: self
                .records
                .iter()
                .filter(|r| within(&r.text, min_words, max_words))
                .cloned()
                .collect(),
        })
    }

    /// Split into `n` contiguous chunks of near-equal size; when the size
    /// is not divisible, earlier chunks receive the extra records.
    pub fn chunk(&self, n: usize) -> Result<Vec<MonoCorpus>> {
        Ok(chunk_records(&self.records, n)?
            .into_iter()
            .map(|records| MonoCorpus {
                lang: self.lang.clone(),
                records,
            })
            .collect())
    }

    /// Random sample of `k` records without replacement, preserving
    /// corpus order.
    pub fn sample(&self, k: usize, seed: u64) -> Result<MonoCorpus> {
        Ok(MonoCorpus {
            lang: self.lang.clone(),
            records: sample_records(&self.records, k, seed)?,
        })
    }

    /// Repeat the corpus until it reaches `target` records: whole copies
    /// first, then a random sample (order-preserving) for the remainder.
    pub fn oversample(&self, target: usize, seed: u64) -> Result<MonoCorpus> {
        Ok(MonoCorpus {
            lang: self.lang.clone(),
            records: oversample_records(&self.records, target, seed)?,
        })
    }

    /// Concatenate in the given order.  All parts must share the language.
    pub fn concat(parts: &[MonoCorpus]) -> Result<MonoCorpus> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArg("concat of zero corpora".into()))?;
        let mut records = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if part.lang != first.lang {
                return Err(Error::LangMismatch {
                    expected: first.lang.clone(),
                    found: part.lang.clone(),
                    context: format!("concat input {i}"),
                });
            }
            records.extend_from_slice(&part.records);
        }
        Ok(MonoCorpus {
            lang: first.lang.clone(),
            records,
        })
    }

    /// SHA-256 over the sentence lines, for change detection in manifests.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.records {
            h.update(r.text.as_bytes());
            h.update(b"\n");
        }
        hex(&h.finalize())
    }
}

impl ParallelCorpus {
    pub fn new(src_lang: impl Into<String>, tgt_lang: impl Into<String>) -> Self {
        ParallelCorpus {
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
            pairs: Vec::new(),
        }
    }

    /// Build from raw line pairs, assuming natively authored text on both
    /// sides (each side's origin is its own language).
    pub fn from_lines<I, J, S, T>(
        src_lang: &str,
        tgt_lang: &str,
        src_lines: I,
        tgt_lines: J,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let src: Vec<String> = src_lines.into_iter().map(Into::into).collect();
        let tgt: Vec<String> = tgt_lines.into_iter().map(Into::into).collect();
        if src.len() != tgt.len() {
            return Err(Error::LengthMismatch {
                left: src.len(),
                right: tgt.len(),
            });
        }
        Ok(ParallelCorpus {
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
            pairs: src
                .into_iter()
                .zip(tgt)
                .map(|(s, t)| PairRecord {
                    src: SideRecord::natural(s, src_lang),
                    tgt: SideRecord::natural(t, tgt_lang),
                })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn src_texts(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|p| p.src.text.as_str())
    }

    pub fn tgt_texts(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|p| p.tgt.text.as_str())
    }

    /// The same pairs with source and target sides exchanged.
    pub fn swapped(&self) -> ParallelCorpus {
        ParallelCorpus {
            src_lang: self.tgt_lang.clone(),
            tgt_lang: self.src_lang.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairRecord {
                    src: p.tgt.clone(),
                    tgt: p.src.clone(),
                })
                .collect(),
        }
    }

    /// Keep pairs where *both* sides' whitespace word counts lie in
    /// `min_words..=max_words`.
    pub fn clean(&self, min_words: usize, max_words: usize) -> Result<ParallelCorpus> {
        check_bounds(min_words, max_words)?;
        Ok(ParallelCorpus {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            pairs: self
                .pairs
                .iter()
                .filter(|p| {
                    within(&p.src.text, min_words, max_words)
                        && within(&p.tgt.text, min_words, max_words)
                })
                .cloned()
                .collect(),
        })
    }

    pub fn chunk(&self, n: usize) -> Result<Vec<ParallelCorpus>> {
        Ok(chunk_records(&self.pairs, n)?
            .into_iter()
            .map(|pairs| ParallelCorpus {
                src_lang: self.src_lang.clone(),
                tgt_lang: self.tgt_lang.clone(),
                pairs,
            })
            .collect())
    }

    pub fn sample(&self, k: usize, seed: u64) -> Result<ParallelCorpus> {
        Ok(ParallelCorpus {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            pairs: sample_records(&self.pairs, k, seed)?,
        })
    }

    pub fn oversample(&self, target: usize, seed: u64) -> Result<ParallelCorpus> {
        Ok(ParallelCorpus {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            pairs: oversample_records(&self.pairs, target, seed)?,
        })
    }

    pub fn concat(parts: &[ParallelCorpus]) -> Result<ParallelCorpus> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArg("concat of zero corpora".into()))?;
        let mut pairs = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if part.src_lang != first.src_lang {
                return Err(Error::LangMismatch {
                    expected: first.src_lang.clone(),
                    found: part.src_lang.clone(),
                    context: format!("concat input {i}, source side"),
                });
            }
            if part.tgt_lang != first.tgt_lang {
                return Err(Error::LangMismatch {
                    expected: first.tgt_lang.clone(),
                    found: part.tgt_lang.clone(),
                    context: format!("concat input {i}, target side"),
                });
            }
            pairs.extend_from_slice(&part.pairs);
        }
        Ok(ParallelCorpus {
            src_lang: first.src_lang.clone(),
            tgt_lang: first.tgt_lang.clone(),
            pairs,
        })
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for p in &self.pairs {
            h.update(p.src.text.as_bytes());
            h.update(b"\t");
            h.update(p.tgt.text.as_bytes());
            h.update(b"\n");
        }
        hex(&h.finalize())
    }
}

fn within(text: &str, min: usize, max: usize) -> bool {
    let w = word_count(text);
    min <= w && w <= max
}

fn check_bounds(min: usize, max: usize) -> Result<()> {
    if min > max {
        return Err(Error::InvalidArg(format!(
            "min words {min} exceeds max words {max}"
        )));
    }
    Ok(())
}

fn chunk_records<T: Clone>(records: &[T], n: usize) -> Result<Vec<Vec<T>>> {
    if n == 0 {
        return Err(Error::InvalidArg("cannot split into zero chunks".into()));
    }
    if n > records.len() {
        return Err(Error::ChunkTooMany {
            size: records.len(),
            chunks: n,
        });
    }
    let base = records.len() / n;
    let extra = records.len() % n;
    let mut out = Vec::with_capacity(n);
    let mut at = 0;
    for i in 0..n {
        let size = base + usize::from(i < extra);
        out.push(records[at..at + size].to_vec());
        at += size;
    }
    Ok(out)
}

/// Sorted indices of a uniform sample without replacement.
fn sample_indices(len: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, len, k).into_vec();
    idx.sort_unstable();
    idx
}

fn sample_records<T: Clone>(records: &[T], k: usize, seed: u64) -> Result<Vec<T>> {
    if k > records.len() {
        return Err(Error::SampleTooLarge {
            requested: k,
            available: records.len(),
        });
    }
    Ok(sample_indices(records.len(), k, seed)
        .into_iter()
        .map(|i| records[i].clone())
        .collect())
}

fn oversample_records<T: Clone>(records: &[T], target: usize, seed: u64) -> Result<Vec<T>> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if target < records.len() {
        return Err(Error::InvalidArg(format!(
            "oversample target {} is smaller than corpus size {}; use sample instead",
            target,
            records.len()
        )));
    }
    let copies = target / records.len();
    let rest = target % records.len();
    let mut out = Vec::with_capacity(target);
    for _ in 0..copies {
        out.extend_from_slice(records);
    }
    out.extend(sample_records(records, rest, seed)?);
    Ok(out)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
