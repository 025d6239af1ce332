//! Translation Edit Rate: word edits (insertions, deletions,
//! substitutions, block shifts) needed to turn the hypothesis into the
//! reference, divided by the reference length.
//!
//! Shifts are found greedily: every block move `(start, len, dest)` with
//! `|dest - start|` within the shift window is tried by brute force, the
//! one with the largest edit-distance reduction is applied for a cost of
//! one, and the search repeats until no move helps.  Ties go to the
//! smallest start, then block length, then destination, which pins down
//! the result exactly.  Tokens are whitespace-split and case-sensitive.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_SHIFT_DIST: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct TerScore {
    /// Total edits over total reference words; 0 is perfect, values above
    /// 1 are possible.
    pub score: f64,
    pub edits: usize,
    pub ref_len: usize,
}

fn levenshtein(a: &[&str], b: &[&str]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &wa) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &wb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(wa != wb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edits for one segment: greedy shifts plus remaining edit distance.
pub(crate) fn segment_edits(hyp: &[&str], reference: &[&str], max_shift_dist: usize) -> usize {
    let mut current: Vec<&str> = hyp.to_vec();
    let mut dist = levenshtein(&current, reference);
    let mut shifts = 0usize;
    loop {
        let mut best: Option<(usize, Vec<&str>)> = None; // (reduction, shifted)
        for start in 0..current.len() {
            for len in 1..=current.len() - start {
                let block = &current[start..start + len];
                let mut rest: Vec<&str> = Vec::with_capacity(current.len() - len);
                rest.extend_from_slice(&current[..start]);
                rest.extend_from_slice(&current[start + len..]);
                for dest in 0..=rest.len() {
                    if dest == start || dest.abs_diff(start) > max_shift_dist {
                        continue;
                    }
                    let mut candidate: Vec<&str> = Vec::with_capacity(current.len());
                    candidate.extend_from_slice(&rest[..dest]);
                    candidate.extend_from_slice(block);
                    candidate.extend_from_slice(&rest[dest..]);
                    let d = levenshtein(&candidate, reference);
                    if d < dist {
                        let reduction = dist - d;
                        // strict > keeps the first of equals, which is the
                        // (start, len, dest)-smallest by iteration order
                        if best.as_ref().is_none_or(|(r, _)| reduction > *r) {
                            best = Some((reduction, candidate));
                        }
                    }
                }
            }
        }
        match best {
            Some((reduction, shifted)) => {
                current = shifted;
                dist -= reduction;
                shifts += 1;
            }
            None => break,
        }
    }
    shifts + dist
}

/// `[edits, ref_len]`
pub(crate) fn segment_stats(hyp: &str, reference: &str, max_shift_dist: usize) -> [f64; 2] {
    let h: Vec<&str> = hyp.split_whitespace().collect();
    let r: Vec<&str> = reference.split_whitespace().collect();
    [segment_edits(&h, &r, max_shift_dist) as f64, r.len() as f64]
}

pub(crate) fn score_from_stats(stats: &[f64]) -> f64 {
    if stats[1] == 0.0 {
        // against a reference with no words, any hypothesis word is pure
        // insertion with nothing to normalize by
        if stats[0] == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        stats[0] / stats[1]
    }
}

/// Corpus TER of `hyps` against aligned single references.
pub fn ter(hyps: &[String], refs: &[String], max_shift_dist: usize) -> Result<TerScore> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::InvalidArg("no segments to score".into()));
    }
    let mut edits = 0.0;
    let mut ref_len = 0.0;
    for (h, r) in hyps.iter().zip(refs) {
        let [e, l] = segment_stats(h, r, max_shift_dist);
        edits += e;
        ref_len += l;
    }
    if ref_len == 0.0 {
        return Err(Error::EmptyReference);
    }
    Ok(TerScore {
        score: edits / ref_len,
        edits: edits as usize,
        ref_len: ref_len as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn one(hyp: &str, reference: &str) -> f64 {
        ter(&strs(&[hyp]), &strs(&[reference]), DEFAULT_MAX_SHIFT_DIST)
            .unwrap()
            .score
    }

    #[test]
    fn identity_is_zero() {
        assert_eq!(one("a b c d", "a b c d"), 0.0);
    }

    #[test]
    fn substitution_costs_one() {
        assert!((one("a b c e", "a b c d") - 0.25).abs() < 1e-12);
    }

    #[test]
    fn insertion_and_deletion_cost_one_each() {
        assert!((one("a b c d x", "a b c d") - 0.25).abs() < 1e-12);
        assert!((one("a b c", "a b c d") - 0.25).abs() < 1e-12);
    }

    #[test]
    fn one_shift_beats_two_substitutions() {
        // moving "b" before "c" fixes everything: 1 shift instead of
        // 2 substitutions
        assert!((one("b a c d", "a b c d") - 0.25).abs() < 1e-12);
    }

    #[test]
    fn block_shift_moves_several_words_for_one_edit() {
        assert!((one("c d a b", "a b c d") - 0.25).abs() < 1e-12);
    }

    #[test]
    fn shift_window_limits_travel() {
        let hyp = strs(&["b a c d"]);
        let reference = strs(&["a b c d"]);
        // a window of zero admits no shifts at all, so the swap costs two
        // plain edits instead of one shift
        assert_eq!(ter(&hyp, &reference, 0).unwrap().edits, 2);
        assert_eq!(
            ter(&hyp, &reference, DEFAULT_MAX_SHIFT_DIST).unwrap().edits,
            1
        );
    }

    #[test]
    fn case_matters() {
        assert!(one("A b c d", "a b c d") > 0.0);
    }

    #[test]
    fn corpus_score_sums_edits_over_reference_words() {
        let t = ter(
            &strs(&["a b", "x y z q"]),
            &strs(&["a b", "x y z w"]),
            DEFAULT_MAX_SHIFT_DIST,
        )
        .unwrap();
        assert_eq!(t.edits, 1);
        assert_eq!(t.ref_len, 6);
        assert!((t.score - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_reference_segment_counts_hyp_as_insertions() {
        let t = ter(
            &strs(&["a b c", "x y"]),
            &strs(&["a b c", ""]),
            DEFAULT_MAX_SHIFT_DIST,
        )
        .unwrap();
        assert_eq!(t.edits, 2);
        assert_eq!(t.ref_len, 3);
    }

    #[test]
    fn entirely_empty_reference_is_an_error() {
        assert!(matches!(
            ter(&strs(&["a"]), &strs(&[""]), DEFAULT_MAX_SHIFT_DIST),
            Err(Error::EmptyReference)
        ));
    }

    #[test]
    fn score_can_exceed_one() {
        assert!(one("q w e r t y", "a") > 1.0);
    }

    #[test]
    fn empty_hypothesis_costs_all_deletions() {
        assert!((one("", "a b c d") - 1.0).abs() < 1e-12);
    }
}
