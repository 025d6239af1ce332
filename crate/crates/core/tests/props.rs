//! Property checks for the corpus algebra, the quantizer, and the metric
//! identities.  These are randomized but bounded small; the heavyweight
//! randomized sweeps live in the acceptance suite of the CLI crate.

use distillery_core::corpus::{MonoCorpus, ParallelCorpus};
use distillery_core::metrics::{self, Smoothing, Tokenizer};
use distillery_core::quant::{self, QuantMode};
use distillery_core::toymt::LexTable;
use proptest::prelude::*;

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec("[a-z]{1,6}", 0..12).prop_map(|w| w.join(" "))
}

fn mono() -> impl Strategy<Value = MonoCorpus> {
    prop::collection::vec(sentence(), 1..60).prop_map(|lines| MonoCorpus::from_lines("aa", lines))
}

fn parallel() -> impl Strategy<Value = ParallelCorpus> {
    prop::collection::vec((sentence(), sentence()), 1..60).prop_map(|pairs| {
        let (src, tgt): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        ParallelCorpus::from_lines("aa", "bb", src, tgt).unwrap()
    })
}

proptest! {
    #[test]
    fn clean_is_idempotent(c in parallel(), min in 1usize..4, span in 0usize..8) {
        let max = min + span;
        let once = c.clean(min, max).unwrap();
        let twice = once.clean(min, max).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.len() <= c.len());
    }

    #[test]
    fn clean_survivors_satisfy_the_bounds(c in parallel(), min in 1usize..4, span in 0usize..8) {
        let max = min + span;
        let cleaned = c.clean(min, max).unwrap();
        for pair in &cleaned.pairs {
            for text in [&pair.src.text, &pair.tgt.text] {
                let words = text.split_whitespace().count();
                prop_assert!((min..=max).contains(&words));
            }
        }
    }

    #[test]
    fn chunk_concat_round_trips(c in parallel(), n in 1usize..8) {
        prop_assume!(n <= c.len());
        let chunks = c.chunk(n).unwrap();
        prop_assert_eq!(chunks.len(), n);
        let sizes: Vec<usize> = chunks.iter().map(|ch| ch.len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        // Remainder goes to the front, so sizes never increase.
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        let back = ParallelCorpus::concat(&chunks).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn sample_is_deterministic_and_order_preserving(c in mono(), seed in any::<u64>()) {
        let k = c.len() / 2;
        let a = c.sample(k, seed).unwrap();
        let b = c.sample(k, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), k);
        // Every sampled record appears in the input, in input order.
        let mut cursor = 0;
        for rec in &a.records {
            let pos = c.records[cursor..].iter().position(|r| r == rec);
            prop_assert!(pos.is_some());
            cursor += pos.unwrap() + 1;
        }
    }

    #[test]
    fn oversample_hits_the_target_exactly(c in parallel(), extra in 0usize..200, seed in any::<u64>()) {
        let target = c.len() + extra;
        let out = c.oversample(target, seed).unwrap();
        prop_assert_eq!(out.len(), target);
        for pair in &out.pairs {
            prop_assert!(c.pairs.contains(pair));
        }
        let again = c.oversample(target, seed).unwrap();
        prop_assert_eq!(out, again);
    }

    #[test]
    fn concat_preserves_order_and_length(a in parallel(), b in parallel()) {
        let joined = ParallelCorpus::concat(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(joined.len(), a.len() + b.len());
        prop_assert_eq!(&joined.pairs[..a.len()], &a.pairs[..]);
        prop_assert_eq!(&joined.pairs[a.len()..], &b.pairs[..]);
    }

    #[test]
    fn metric_identities_hold_on_random_text(
        // Four words or more per line, so unsmoothed 4-gram totals are nonzero.
        lines in prop::collection::vec(
            prop::collection::vec("[a-z]{1,5}", 4..9).prop_map(|w| w.join(" ")),
            1..10,
        ),
    ) {
        let refs: Vec<String> = lines;
        let hyps = refs.clone();
        let b = metrics::bleu(&hyps, &refs, Tokenizer::Thirteen, Smoothing::None).unwrap();
        prop_assert!((b.score - 100.0).abs() < 1e-9);
        let c = metrics::chrf(&hyps, &refs, 6, 2.0).unwrap();
        prop_assert!((c - 100.0).abs() < 1e-9);
        let t = metrics::ter(&hyps, &refs, 10).unwrap();
        prop_assert_eq!(t.edits, 0);
    }

    #[test]
    fn quantize_is_idempotent_for_every_mode_and_bits(
        probs in prop::collection::vec(1u32..1000, 1..12),
        mode in prop_oneof![Just(QuantMode::Fixed), Just(QuantMode::Log)],
        bits in 1u8..10,
    ) {
        let total: u32 = probs.iter().sum();
        let mut table = LexTable::default();
        for (i, p) in probs.iter().enumerate() {
            table
                .rows
                .entry("f".to_string())
                .or_default()
                .insert(format!("e{i}"), f64::from(*p) / f64::from(total));
        }
        let (once, _) = quant::quantize(&table, mode, bits).unwrap();
        let (twice, stats) = quant::quantize(&once, mode, bits).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(stats.distinct_values <= 1usize << bits);
    }

    #[test]
    fn packed_model_round_trips(
        probs in prop::collection::vec(1u32..1000, 1..12),
        bits in 1u8..10,
    ) {
        let total: u32 = probs.iter().sum();
        let mut table = LexTable::default();
        for (i, p) in probs.iter().enumerate() {
            table
                .rows
                .entry(format!("f{}", i % 3))
                .or_default()
                .insert(format!("e{i}"), f64::from(*p) / f64::from(total));
        }
        let (quantized, _) = quant::quantize(&table, QuantMode::Fixed, bits).unwrap();
        prop_assume!(quantized.entry_count() > 0);
        let bytes = quant::to_packed_bytes(&quantized, QuantMode::Fixed, bits).unwrap();
        let (decoded, mode, got_bits) = quant::from_packed_bytes(&bytes).unwrap();
        prop_assert_eq!(mode, QuantMode::Fixed);
        prop_assert_eq!(got_bits, bits);
        prop_assert_eq!(decoded, quantized);
    }
}
