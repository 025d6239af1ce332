//! chrF: character n-gram F-score (Popović 2015).  Whitespace is removed
//! entirely, n-gram statistics for n = 1..6 are pooled over the corpus,
//! and the per-order F-scores are averaged with recall weighted β = 2.
//!
//! Orders for which neither side of the corpus has a single n-gram (e.g.
//! 4-grams when every segment is three characters long) are left out of
//! the average instead of contributing a spurious zero; identical texts
//! score 100 regardless of length.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_N: usize = 6;
pub const DEFAULT_BETA: f64 = 2.0;

fn chars_no_ws(text: &str) -> Vec<char> {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

/// `[matches 1..n, hyp totals 1..n, ref totals 1..n]`
pub(crate) fn segment_stats(hyp: &str, reference: &str, max_n: usize) -> Vec<f64> {
    let h = chars_no_ws(hyp);
    let r = chars_no_ws(reference);
    let mut stats = vec![0.0; 3 * max_n];
    for n in 1..=max_n {
        let mut rc: HashMap<&[char], usize> = HashMap::new();
        if r.len() >= n {
            for w in r.windows(n) {
                *rc.entry(w).or_insert(0) += 1;
            }
        }
        let mut matches = 0usize;
        if h.len() >= n {
            let mut hc: HashMap<&[char], usize> = HashMap::new();
            for w in h.windows(n) {
                *hc.entry(w).or_insert(0) += 1;
            }
            matches = hc
                .iter()
                .map(|(gram, &c)| c.min(rc.get(gram).copied().unwrap_or(0)))
                .sum();
        }
        stats[n - 1] = matches as f64;
        stats[max_n + n - 1] = h.len().saturating_sub(n - 1) as f64;
        stats[2 * max_n + n - 1] = r.len().saturating_sub(n - 1) as f64;
    }
    stats
}

pub(crate) fn score_from_stats(stats: &[f64], max_n: usize, beta: f64) -> f64 {
    let beta2 = beta * beta;
    let mut f_sum = 0.0;
    let mut effective = 0usize;
    for n in 0..max_n {
        let (m, ht, rt) = (stats[n], stats[max_n + n], stats[2 * max_n + n]);
        if ht == 0.0 && rt == 0.0 {
            continue; // order longer than anything in the corpus
        }
        effective += 1;
        let p = if ht == 0.0 { 0.0 } else { m / ht };
        let r = if rt == 0.0 { 0.0 } else { m / rt };
        let denom = beta2 * p + r;
        if denom > 0.0 {
            f_sum += (1.0 + beta2) * p * r / denom;
        }
    }
    if effective == 0 {
        return 0.0;
    }
    100.0 * f_sum / effective as f64
}

/// Corpus chrF of `hyps` against aligned single references.
pub fn chrf(hyps: &[String], refs: &[String], max_n: usize, beta: f64) -> Result<f64> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::InvalidArg("no segments to score".into()));
    }
    if max_n == 0 {
        return Err(Error::InvalidArg("chrf needs max_n >= 1".into()));
    }
    let mut pooled = vec![0.0; 3 * max_n];
    for (h, r) in hyps.iter().zip(refs) {
        for (acc, s) in pooled.iter_mut().zip(segment_stats(h, r, max_n)) {
            *acc += s;
        }
    }
    Ok(score_from_stats(&pooled, max_n, beta))
}
