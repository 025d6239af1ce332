//! The `13a` tokenizer from the WMT mteval scripts: unescape a handful
//! of XML entities, then split punctuation from words with four regex
//! passes.  Using the exact same rules as the reference evaluators keeps
//! BLEU numbers comparable with published ones.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Tokenizer {
    /// mteval-v13a rules; the usual default for BLEU.
    #[default]
    #[serde(rename = "13a")]
    Thirteen,
    /// Plain whitespace splitting, for pre-tokenized text.
    #[serde(rename = "none")]
    Whitespace,
}

impl Tokenizer {
    pub fn name(&self) -> &'static str {
        match self {
            Tokenizer::Thirteen => "13a",
            Tokenizer::Whitespace => "none",
        }
    }

    pub fn tokenize(&self, line: &str) -> Vec<String> {
        match self {
            Tokenizer::Thirteen => tokenize_13a(line),
            Tokenizer::Whitespace => line.split_whitespace().map(str::to_string).collect(),
        }
    }
}

impl std::str::FromStr for Tokenizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "13a" => Ok(Tokenizer::Thirteen),
            "none" => Ok(Tokenizer::Whitespace),
            other => Err(format!(
                "unknown tokenizer {other:?} (expected 13a or none)"
            )),
        }
    }
}

struct Rules {
    punct: Regex,
    period_before: Regex,
    period_after: Regex,
    digit_dash: Regex,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        // punctuation and symbols, but not . , - between digits
        punct: Regex::new(r"([\{-\~\[-` -\&\(-\+\:-\@/])").unwrap(),
        period_before: Regex::new(r"([^0-9])([\.,])").unwrap(),
        period_after: Regex::new(r"([\.,])([^0-9])").unwrap(),
        digit_dash: Regex::new(r"([0-9])(-)").unwrap(),
    })
}

pub fn tokenize_13a(line: &str) -> Vec<String> {
    let mut s = line.to_string();
    if s.contains('&') {
        s = s
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    // pad so the digit-context rules see a non-digit at the edges
    let s = format!(" {s} ");
    let r = rules();
    let s = r.punct.replace_all(&s, " $1 ");
    let s = r.period_before.replace_all(&s, "$1 $2 ");
    let s = r.period_after.replace_all(&s, " $1 $2");
    let s = r.digit_dash.replace_all(&s, "$1 - ");
    s.split_whitespace().map(str::to_string).collect()
}
