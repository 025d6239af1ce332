//! Corpus pipeline, toy MT models, and evaluation metrics for
//! knowledge-distillation experiments.
//!
//! The crate is organised around a handful of small building blocks:
//!
//! * [`corpus`] — monolingual / parallel corpora with per-sentence
//!   provenance, plus the usual wrangling ops (clean, chunk, sample,
//!   oversample, concat).
//! * [`backend`] — pluggable sentence translators: external commands
//!   speaking a line protocol, HTTP endpoints, or in-process toy models.
//! * [`toymt`] — a tiny IBM Model 1 lexical translator: EM training,
//!   greedy decoding, pruning, and a plain-text table format.
//! * [`pipeline`] — dataset constructions for distillation experiments
//!   (back-translation, forward translation, round-trip synthesis) and
//!   recipe-driven training-set composition with lineage tracking.
//! * [`metrics`] — corpus BLEU, chrF, TER, and paired-bootstrap
//!   significance testing.
//! * [`origin`] — origin-language test-set splits and translationese
//!   diagnostics.
//! * [`quant`] — probability-table quantization and a packed binary
//!   model format.

pub mod backend;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod origin;
pub mod pipeline;
pub mod quant;
pub mod toymt;

pub use error::{Error, ErrorClass, Result};
