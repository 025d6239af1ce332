//! Translation quality metrics and significance testing.
//!
//! All corpus scores pool sufficient statistics over segments (never
//! average per-segment scores), which makes them exactly resampleable
//! for the paired bootstrap.

mod bleu;
mod bootstrap;
mod chrf;
mod ter;
mod tokenize;

pub use bleu::{bleu, BleuScore, Smoothing};
pub use bootstrap::{paired_bootstrap, BootstrapMetric, BootstrapResult};
pub use chrf::{chrf, DEFAULT_BETA, DEFAULT_MAX_N};
pub use ter::{ter, TerScore, DEFAULT_MAX_SHIFT_DIST};
pub use tokenize::{tokenize_13a, Tokenizer};
