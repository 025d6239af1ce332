//! A deliberately small lexical translator: IBM Model 1 without a NULL
//! word, trained with EM, decoded greedily word by word.
//!
//! It exists to make distillation pipelines testable end to end — teacher
//! and student are real trained models with real probability tables — not
//! to produce good translations.  On a bijective toy vocabulary it is
//! exact, which is what the end-to-end tests exploit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::corpus::ParallelCorpus;
use crate::error::{Error, Result};

/// Lexical translation table `t(e|f)`: probability of target word `e`
/// given source word `f`.  Ordered maps keep every iteration and dump
/// deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LexTable {
    pub rows: BTreeMap<String, BTreeMap<String, f64>>,
}

impl LexTable {
    /// Total number of `(f, e)` entries.
    pub fn entry_count(&self) -> usize {
        self.rows.values().map(|r| r.len()).sum()
    }

    pub fn source_vocab(&self) -> usize {
        self.rows.len()
    }

    pub fn target_vocab(&self) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for row in self.rows.values() {
            seen.extend(row.keys());
        }
        seen.len()
    }

    /// Most likely target word for `f`, ties broken toward the
    /// lexicographically smallest word.  `None` for unknown `f`.
    pub fn argmax(&self, f: &str) -> Option<&str> {
        let row = self.rows.get(f)?;
        let mut best: Option<(&str, f64)> = None;
        for (e, &p) in row {
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((e, p)),
            }
        }
        best.map(|(e, _)| e)
    }

    /// Translate one sentence: per-token argmax, unknown tokens copied
    /// through unchanged.
    pub fn decode(&self, sentence: &str) -> String {
        sentence
            .split_whitespace()
            .map(|tok| self.argmax(tok).unwrap_or(tok))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Drop entries with probability below `min_prob`, optionally cap each
    /// row at its `top_k` most probable entries, and renormalize what is
    /// left.  Rows that lose all entries disappear (their source words
    /// become unknown and copy through at decode time).
    pub fn prune(&self, min_prob: f64, top_k: Option<usize>) -> LexTable {
        let mut rows = BTreeMap::new();
        for (f, row) in &self.rows {
            let mut kept: Vec<(&String, f64)> = row
                .iter()
                .filter(|(_, &p)| p >= min_prob)
                .map(|(e, &p)| (e, p))
                .collect();
            // prob descending, then word ascending — same order as the dump
            kept.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
            if let Some(k) = top_k {
                kept.truncate(k);
            }
            let sum: f64 = kept.iter().map(|(_, p)| p).sum();
            if sum <= 0.0 {
                continue;
            }
            rows.insert(
                f.clone(),
                kept.into_iter()
                    .map(|(e, p)| (e.clone(), p / sum))
                    .collect(),
            );
        }
        LexTable { rows }
    }

    /// Plain-text dump: `f<TAB>e<TAB>prob` lines, grouped by source word,
    /// most probable entries first (ties by target word).  Probabilities
    /// use the shortest representation that round-trips exactly.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (f, row) in &self.rows {
            let mut entries: Vec<(&String, f64)> = row
                .iter()
                .filter(|(_, &p)| p > 0.0)
                .map(|(e, &p)| (e, p))
                .collect();
            entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
            for (e, p) in entries {
                out.push_str(&format!("{f}\t{e}\t{p}\n"));
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_tsv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<LexTable> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut rows: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let bad = |message: String| Error::Format {
                path: path.to_path_buf(),
                message: format!("line {}: {message}", i + 1),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let [f, e, prob] = fields[..] else {
                return Err(bad(format!(
                    "expected 3 tab-separated fields, got {}",
                    fields.len()
                )));
            };
            if f.is_empty() || e.is_empty() {
                return Err(bad("empty word".into()));
            }
            let p: f64 = prob
                .parse()
                .map_err(|_| bad(format!("bad probability {prob:?}")))?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(bad(format!("probability {p} outside (0, 1]")));
            }
            if rows
                .entry(f.to_string())
                .or_default()
                .insert(e.to_string(), p)
                .is_some()
            {
                return Err(bad(format!("duplicate entry {f:?} -> {e:?}")));
            }
        }
        Ok(LexTable { rows })
    }
}

/// Train a lexical table `t(tgt|src)` with EM.
///
/// Initialisation is uniform over co-occurring pairs: `t0(e|f) = 1/n`
/// where `n` is the number of distinct target words appearing in any pair
/// alongside `f`.  Each iteration records the corpus log-likelihood under
/// the parameters *entering* the iteration, so `log_likelihoods[0]` scores
/// the uniform table; the sequence is non-decreasing (a property the
/// tests check to a 1e-9 tolerance).
pub fn train_ibm1(corpus: &ParallelCorpus, iterations: usize) -> Result<(LexTable, Vec<f64>)> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let tokenized: Vec<(Vec<&str>, Vec<&str>)> = corpus
        .pairs
        .iter()
        .map(|p| {
            (
                p.src.text.split_whitespace().collect(),
                p.tgt.text.split_whitespace().collect(),
            )
        })
        .collect();
    for (i, (f, e)) in tokenized.iter().enumerate() {
        if f.is_empty() || e.is_empty() {
            return Err(Error::InvalidArg(format!(
                "pair {} has an empty side; clean the corpus first",
                i + 1
            )));
        }
    }

    // uniform over co-occurring target words
    let mut cooc: BTreeMap<&str, std::collections::BTreeSet<&str>> = BTreeMap::new();
    for (fs, es) in &tokenized {
        for f in fs {
            let set = cooc.entry(f).or_default();
            set.extend(es.iter());
        }
    }
    let mut t: BTreeMap<&str, BTreeMap<&str, f64>> = cooc
        .into_iter()
        .map(|(f, es)| {
            let p = 1.0 / es.len() as f64;
            (f, es.into_iter().map(|e| (e, p)).collect())
        })
        .collect();

    let mut lls = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        lls.push(log_likelihood(&tokenized, &t));

        let mut counts: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
        let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
        for (fs, es) in &tokenized {
            for e in es {
                let denom: f64 = fs
                    .iter()
                    .map(|f| t.get(f).and_then(|r| r.get(e)).copied().unwrap_or(0.0))
                    .sum();
                for f in fs {
                    let p = t.get(f).and_then(|r| r.get(e)).copied().unwrap_or(0.0);
                    if p > 0.0 {
                        let c = p / denom;
                        *counts.entry(f).or_default().entry(e).or_default() += c;
                        *totals.entry(f).or_default() += c;
                    }
                }
            }
        }
        t = counts
            .into_iter()
            .map(|(f, row)| {
                let total = totals[f];
                (f, row.into_iter().map(|(e, c)| (e, c / total)).collect())
            })
            .collect();
    }

    let rows = t
        .into_iter()
        .map(|(f, row)| {
            (
                f.to_string(),
                row.into_iter().map(|(e, p)| (e.to_string(), p)).collect(),
            )
        })
        .collect();
    Ok((LexTable { rows }, lls))
}

/// Model 1 log-likelihood without NULL: alignment positions are uniform
/// over the source tokens, so each target token contributes
/// `ln(1/|F| * sum_f t(e|f))`.
fn log_likelihood(
    tokenized: &[(Vec<&str>, Vec<&str>)],
    t: &BTreeMap<&str, BTreeMap<&str, f64>>,
) -> f64 {
    let mut ll = 0.0;
    for (fs, es) in tokenized {
        ll -= es.len() as f64 * (fs.len() as f64).ln();
        for e in es {
            let s: f64 = fs
                .iter()
                .map(|f| t.get(f).and_then(|r| r.get(e)).copied().unwrap_or(0.0))
                .sum();
            ll += s.ln();
        }
    }
    ll
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ParallelCorpus {
        ParallelCorpus::from_lines("f", "e", ["a b", "a"], ["x y", "x"]).unwrap()
    }

    #[test]
    fn init_is_uniform_over_cooccurring_words() {
        let (t, _) = train_ibm1(&toy(), 0).unwrap();
        assert_eq!(t.rows["a"]["x"], 0.5);
        assert_eq!(t.rows["a"]["y"], 0.5);
        assert_eq!(t.rows["b"]["x"], 0.5);
        assert_eq!(t.rows["b"]["y"], 0.5);
    }

    #[test]
    fn em_concentrates_mass_on_the_right_words() {
        let (t, lls) = train_ibm1(&toy(), 10).unwrap();
        // worked example, checked against a reference implementation
        assert!((lls[0] - (-2.0794415416798357)).abs() < 1e-12);
        assert!((t.rows["a"]["x"] - 0.9970352732178555).abs() < 1e-9);
        assert!((t.rows["b"]["y"] - 0.9289996121524242).abs() < 1e-9);
        assert!(t.rows["a"]["x"] > 0.8);
    }

    #[test]
    fn log_likelihood_never_decreases() {
        let (_, lls) = train_ibm1(&toy(), 10).unwrap();
        assert_eq!(lls.len(), 10);
        for w in lls.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "LL dropped: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn rows_stay_normalized() {
        let (t, _) = train_ibm1(&toy(), 5).unwrap();
        for (f, row) in &t.rows {
            let sum: f64 = row.values().sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {f} sums to {sum}");
        }
    }

    #[test]
    fn training_rejects_empty_and_degenerate_input() {
        assert!(train_ibm1(&ParallelCorpus::new("f", "e"), 5).is_err());
        let degenerate = ParallelCorpus::from_lines("f", "e", ["a"], ["   "]).unwrap();
        assert!(train_ibm1(&degenerate, 5).is_err());
    }

    #[test]
    fn decode_takes_argmax_and_copies_unknowns() {
        let mut t = LexTable::default();
        t.rows.insert(
            "hund".into(),
            BTreeMap::from([("dog".to_string(), 0.9), ("hound".to_string(), 0.1)]),
        );
        assert_eq!(t.decode("hund unbekannt hund"), "dog unbekannt dog");
        assert_eq!(t.decode(""), "");
    }

    #[test]
    fn decode_breaks_ties_lexicographically() {
        let mut t = LexTable::default();
        t.rows.insert(
            "x".into(),
            BTreeMap::from([("beta".to_string(), 0.5), ("alpha".to_string(), 0.5)]),
        );
        assert_eq!(t.argmax("x"), Some("alpha"));
    }

    #[test]
    fn prune_drops_renormalizes_and_removes_empty_rows() {
        let mut t = LexTable::default();
        t.rows.insert(
            "a".into(),
            BTreeMap::from([
                ("x".to_string(), 0.7),
                ("y".to_string(), 0.25),
                ("z".to_string(), 0.05),
            ]),
        );
        t.rows
            .insert("b".into(), BTreeMap::from([("q".to_string(), 0.04)]));
        let p = t.prune(0.1, None);
        assert!(!p.rows.contains_key("b"));
        let row = &p.rows["a"];
        assert_eq!(row.len(), 2);
        assert!((row["x"] - 0.7 / 0.95).abs() < 1e-12);
        assert!((row["y"] - 0.25 / 0.95).abs() < 1e-12);
    }

    #[test]
    fn prune_top_k_keeps_most_probable_entries() {
        let mut t = LexTable::default();
        t.rows.insert(
            "a".into(),
            BTreeMap::from([
                ("x".to_string(), 0.5),
                ("y".to_string(), 0.3),
                ("z".to_string(), 0.2),
            ]),
        );
        let p = t.prune(0.0, Some(2));
        let row = &p.rows["a"];
        assert_eq!(row.len(), 2);
        assert!(row.contains_key("x") && row.contains_key("y"));
        assert!((row.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn save_orders_by_source_then_descending_prob() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tsv");
        let mut t = LexTable::default();
        t.rows.insert(
            "b".into(),
            BTreeMap::from([("p".to_string(), 0.25), ("q".to_string(), 0.75)]),
        );
        t.rows
            .insert("a".into(), BTreeMap::from([("r".to_string(), 1.0)]));
        t.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a\tr\t1\nb\tq\t0.75\nb\tp\t0.25\n");
    }

    #[test]
    fn save_load_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tsv");
        let (t, _) = train_ibm1(&toy(), 7).unwrap();
        t.save(&path).unwrap();
        assert_eq!(LexTable::load(&path).unwrap(), t);
    }

    #[test]
    fn load_rejects_malformed_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tsv");
        for bad in [
            "a\tx\n",                 // missing field
            "a\tx\t0.5\textra\n",     // extra field
            "a\tx\tnope\n",           // unparsable prob
            "a\tx\t0\n",              // zero prob
            "a\tx\t1.5\n",            // out of range
            "a\tx\t0.5\na\tx\t0.4\n", // duplicate
        ] {
            fs::write(&path, bad).unwrap();
            assert!(LexTable::load(&path).is_err(), "accepted {bad:?}");
        }
    }
}
