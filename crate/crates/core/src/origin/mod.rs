//! Origin-language test-set splits.
//!
//! WMT test sets mix documents originally written in the source
//! language, documents originally written in the target language (so the
//! "source" side is itself a translation), and documents from third
//! languages.  System rankings can flip between those buckets, so
//! scoring them separately is more informative than one pooled number.
//! The type-token ratio is the standard quick check that translated text
//! really is lexically flatter than native text.

mod sgml;

pub use sgml::{load_sgml, load_tsv};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{self, Smoothing, Tokenizer};

/// One reference segment with its document's origin annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub doc_id: String,
    pub origlang: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSet {
    pub segments: Vec<Segment>,
}

impl TestSet {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn texts(&self) -> Vec<String> {
        self.segments.iter().map(|s| s.text.clone()).collect()
    }
}

/// Which side of the evaluated pair a document was originally written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginBucket {
    /// Originally written in the source language: genuine source text,
    /// reference side is a translation.
    Src,
    /// Originally written in the target language: the source side is
    /// translationese, references are natural text.
    Tgt,
    /// Originally written in some third language.
    Other,
}

impl OriginBucket {
    pub fn name(&self) -> &'static str {
        match self {
            OriginBucket::Src => "src",
            OriginBucket::Tgt => "tgt",
            OriginBucket::Other => "other",
        }
    }
}

pub fn bucket_of(origlang: &str, src_lang: &str, tgt_lang: &str) -> OriginBucket {
    if origlang == src_lang {
        OriginBucket::Src
    } else if origlang == tgt_lang {
        OriginBucket::Tgt
    } else {
        OriginBucket::Other
    }
}

/// Segment indices per bucket, in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OriginSplit {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub other: Vec<usize>,
}

pub fn split_by_origin(test_set: &TestSet, src_lang: &str, tgt_lang: &str) -> OriginSplit {
    let mut split = OriginSplit::default();
    for (i, seg) in test_set.segments.iter().enumerate() {
        match bucket_of(&seg.origlang, src_lang, tgt_lang) {
            OriginBucket::Src => split.src.push(i),
            OriginBucket::Tgt => split.tgt.push(i),
            OriginBucket::Other => split.other.push(i),
        }
    }
    split
}

/// Metric settings shared by every bucket evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalParams {
    pub tokenizer: Tokenizer,
    pub smoothing: Smoothing,
    pub chrf_max_n: usize,
    pub chrf_beta: f64,
    pub ter_shift_dist: usize,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            tokenizer: Tokenizer::default(),
            smoothing: Smoothing::default(),
            chrf_max_n: metrics::DEFAULT_MAX_N,
            chrf_beta: metrics::DEFAULT_BETA,
            ter_shift_dist: metrics::DEFAULT_MAX_SHIFT_DIST,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BucketReport {
    pub segments: usize,
    pub bleu: f64,
    pub chrf: f64,
    pub ter: f64,
    /// Type-token ratios of the hypothesis and reference sides.
    pub hyp_ttr: f64,
    pub ref_ttr: f64,
}

/// Scores per origin bucket, keyed "all" / "src" / "tgt" / "other".
/// Empty buckets are absent.
#[derive(Debug, Clone, Serialize)]
pub struct OriginReport {
    pub src_lang: String,
    pub tgt_lang: String,
    pub buckets: BTreeMap<String, BucketReport>,
}

fn bucket_report(hyps: &[String], refs: &[String], params: &EvalParams) -> Result<BucketReport> {
    let bleu = metrics::bleu(hyps, refs, params.tokenizer, params.smoothing)?;
    let chrf = metrics::chrf(hyps, refs, params.chrf_max_n, params.chrf_beta)?;
    let ter = metrics::ter(hyps, refs, params.ter_shift_dist)?;
    Ok(BucketReport {
        segments: hyps.len(),
        bleu: bleu.score,
        chrf,
        ter: ter.score,
        hyp_ttr: type_token_ratio(hyps.iter().map(String::as_str)).map_or(0.0, |t| t.ratio),
        ref_ttr: type_token_ratio(refs.iter().map(String::as_str)).map_or(0.0, |t| t.ratio),
    })
}

/// Score `hyps` against the test set, overall and per origin bucket.
pub fn evaluate_by_origin(
    test_set: &TestSet,
    hyps: &[String],
    src_lang: &str,
    tgt_lang: &str,
    params: &EvalParams,
) -> Result<OriginReport> {
    if hyps.len() != test_set.len() {
        return Err(Error::LengthMismatch {
            left: hyps.len(),
            right: test_set.len(),
        });
    }
    let refs = test_set.texts();
    let mut buckets = BTreeMap::new();
    buckets.insert("all".to_string(), bucket_report(hyps, &refs, params)?);

    let split = split_by_origin(test_set, src_lang, tgt_lang);
    for (bucket, indices) in [
        (OriginBucket::Src, &split.src),
        (OriginBucket::Tgt, &split.tgt),
        (OriginBucket::Other, &split.other),
    ] {
        if indices.is_empty() {
            continue;
        }
        let h: Vec<String> = indices.iter().map(|&i| hyps[i].clone()).collect();
        let r: Vec<String> = indices.iter().map(|&i| refs[i].clone()).collect();
        buckets.insert(bucket.name().to_string(), bucket_report(&h, &r, params)?);
    }
    Ok(OriginReport {
        src_lang: src_lang.to_string(),
        tgt_lang: tgt_lang.to_string(),
        buckets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TtrStats {
    pub types: usize,
    pub tokens: usize,
    pub ratio: f64,
}

/// Corpus-level type-token ratio over lower-cased whitespace tokens.
/// `None` when there are no tokens at all.
pub fn type_token_ratio<'a>(texts: impl IntoIterator<Item = &'a str>) -> Option<TtrStats> {
    let mut types: BTreeSet<String> = BTreeSet::new();
    let mut tokens = 0usize;
    for text in texts {
        for tok in text.split_whitespace() {
            tokens += 1;
            types.insert(tok.to_lowercase());
        }
    }
    if tokens == 0 {
        return None;
    }
    Some(TtrStats {
        types: types.len(),
        tokens,
        ratio: types.len() as f64 / tokens as f64,
    })
}
