//! Corpus BLEU over pooled n-gram counts, matching the usual reference
//! implementation: clipped matches and totals are summed across segments
//! for n = 1..4, combined by geometric mean, and scaled by the brevity
//! penalty.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::tokenize::Tokenizer;

const MAX_ORDER: usize = 4;
/// `[matches 1..4, totals 1..4, hyp_len, ref_len]`
pub(crate) const STATS_LEN: usize = 2 * MAX_ORDER + 2;
const ADD_K: f64 = 0.1;

/// What to do about n-gram orders with zero matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    /// No smoothing: any zero precision zeroes the whole score.
    #[default]
    None,
    /// Add 0.1 to every order's matches and totals.
    AddK,
}

impl Smoothing {
    pub fn name(&self) -> &'static str {
        match self {
            Smoothing::None => "none",
            Smoothing::AddK => "add-k",
        }
    }
}

impl std::str::FromStr for Smoothing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Smoothing::None),
            "add-k" => Ok(Smoothing::AddK),
            other => Err(format!(
                "unknown smoothing {other:?} (expected none or add-k)"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BleuScore {
    /// 0–100.
    pub score: f64,
    /// Clipped n-gram precisions for n = 1..4, each 0–1.
    pub precisions: [f64; 4],
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Sufficient statistics of one segment; summing these over any subset of
/// segments and applying [`score_from_stats`] gives that subset's BLEU.
pub(crate) fn segment_stats(hyp: &[String], reference: &[String]) -> [f64; STATS_LEN] {
    let mut stats = [0.0; STATS_LEN];
    for n in 1..=MAX_ORDER {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        let matches: usize = h
            .iter()
            .map(|(gram, &c)| c.min(r.get(gram).copied().unwrap_or(0)))
            .sum();
        stats[n - 1] = matches as f64;
        stats[MAX_ORDER + n - 1] = hyp.len().saturating_sub(n - 1) as f64;
    }
    stats[2 * MAX_ORDER] = hyp.len() as f64;
    stats[2 * MAX_ORDER + 1] = reference.len() as f64;
    stats
}

pub(crate) fn score_from_stats(stats: &[f64], smoothing: Smoothing) -> BleuScore {
    let hyp_len = stats[2 * MAX_ORDER];
    let ref_len = stats[2 * MAX_ORDER + 1];
    let mut precisions = [0.0; MAX_ORDER];
    for n in 0..MAX_ORDER {
        let (m, t) = (stats[n], stats[MAX_ORDER + n]);
        precisions[n] = match smoothing {
            Smoothing::None => {
                if t == 0.0 {
                    0.0
                } else {
                    m / t
                }
            }
            Smoothing::AddK => (m + ADD_K) / (t + ADD_K),
        };
    }
    let brevity_penalty = if hyp_len == 0.0 {
        0.0
    } else if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len / hyp_len).exp()
    };
    let score = if precisions.contains(&0.0) || hyp_len == 0.0 {
        0.0
    } else {
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
        100.0 * brevity_penalty * log_mean.exp()
    };
    BleuScore {
        score,
        precisions,
        brevity_penalty,
        hyp_len: hyp_len as usize,
        ref_len: ref_len as usize,
    }
}

/// Corpus BLEU of `hyps` against aligned single references.
pub fn bleu(
    hyps: &[String],
    refs: &[String],
    tokenizer: Tokenizer,
    smoothing: Smoothing,
) -> Result<BleuScore> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::InvalidArg("no segments to score".into()));
    }
    let mut pooled = [0.0; STATS_LEN];
    for (h, r) in hyps.iter().zip(refs) {
        let stats = segment_stats(&tokenizer.tokenize(h), &tokenizer.tokenize(r));
        for (acc, s) in pooled.iter_mut().zip(stats) {
            *acc += s;
        }
    }
    Ok(score_from_stats(&pooled, smoothing))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_corpus_scores_100() {
        let c = strs(&["the cat sat on the mat", "a quick brown fox"]);
        let b = bleu(&c, &c, Tokenizer::Thirteen, Smoothing::None).unwrap();
        assert!((b.score - 100.0).abs() < 1e-9);
        assert_eq!(b.brevity_penalty, 1.0);
    }

    #[test]
    fn unigram_precision_is_clipped() {
        let b = bleu(
            &strs(&["the the the the the the the"]),
            &strs(&["the cat is on the mat"]),
            Tokenizer::Whitespace,
            Smoothing::None,
        )
        .unwrap();
        // "the" appears twice in the reference, so 7 hypothesis tokens
        // yield only 2 clipped matches
        assert!((b.precisions[0] - 2.0 / 7.0).abs() < 1e-12);
        assert_eq!(b.score, 0.0, "no bigram matches and no smoothing");
    }

    #[test]
    fn brevity_penalty_kicks_in_for_short_hypotheses() {
        let b = bleu(
            &strs(&["a b c d e"]),
            &strs(&["a b c d e f g h i j"]),
            Tokenizer::Whitespace,
            Smoothing::None,
        )
        .unwrap();
        // all precisions are 1, so the score is exactly 100 * exp(1 - 2)
        assert!((b.brevity_penalty - (-1.0f64).exp()).abs() < 1e-12);
        assert!((b.score - 36.787944117144235).abs() < 1e-9);
    }

    #[test]
    fn no_penalty_for_long_hypotheses() {
        let b = bleu(
            &strs(&["a b c d e f"]),
            &strs(&["a b c d e"]),
            Tokenizer::Whitespace,
            Smoothing::None,
        )
        .unwrap();
        assert_eq!(b.brevity_penalty, 1.0);
    }

    #[test]
    fn add_k_rescues_zero_orders() {
        let hyp = strs(&["the cat"]);
        let reference = strs(&["the dog"]);
        let plain = bleu(&hyp, &reference, Tokenizer::Whitespace, Smoothing::None).unwrap();
        assert_eq!(plain.score, 0.0);
        let smoothed = bleu(&hyp, &reference, Tokenizer::Whitespace, Smoothing::AddK).unwrap();
        assert!(smoothed.score > 0.0);
        // p1 = (1 + 0.1) / (2 + 0.1)
        assert!((smoothed.precisions[0] - 1.1 / 2.1).abs() < 1e-12);
    }

    #[test]
    fn pooling_differs_from_averaging_segments() {
        // one perfect short segment must not drown out a bad long one
        let hyps = strs(&["a b c d", "x x x x x x x x x x x x"]);
        let refs = strs(&["a b c d", "q w e r t y u i o p k j"]);
        let b = bleu(&hyps, &refs, Tokenizer::Whitespace, Smoothing::None).unwrap();
        assert!((b.precisions[0] - 4.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn tokenizer_affects_matching() {
        let hyp = strs(&["Hello, world!"]);
        let reference = strs(&["Hello , world !"]);
        let with_13a = bleu(&hyp, &reference, Tokenizer::Thirteen, Smoothing::None).unwrap();
        assert!((with_13a.score - 100.0).abs() < 1e-9);
        let plain = bleu(&hyp, &reference, Tokenizer::Whitespace, Smoothing::None).unwrap();
        assert!(plain.score < 100.0);
    }

    #[test]
    fn length_mismatch_and_empty_input_error() {
        assert!(bleu(
            &strs(&["a"]),
            &strs(&[]),
            Tokenizer::Thirteen,
            Smoothing::None
        )
        .is_err());
        assert!(bleu(&[], &[], Tokenizer::Thirteen, Smoothing::None).is_err());
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let b = bleu(
            &strs(&[""]),
            &strs(&["a b c"]),
            Tokenizer::Whitespace,
            Smoothing::None,
        )
        .unwrap();
        assert_eq!(b.score, 0.0);
        assert_eq!(b.brevity_penalty, 0.0);
    }
}
