//! Pluggable sentence translators.
//!
//! A backend turns a batch of source sentences into a batch of
//! translations, one line per sentence, order preserved.  Three
//! transports speak that protocol:
//!
//! * `command` — spawn an external program per batch, write the batch to
//!   its stdin (one sentence per line), read its stdout to EOF.  `cat` is
//!   a valid (identity) backend, which the tests use.
//! * `http` — POST the batch as a `text/plain` body to an endpoint and
//!   read the translated lines from the response body.
//! * `toy` — decode in-process with a lexical translation table.
//!
//! Every transport must return exactly as many lines as it was given.  A
//! batch that fails (spawn error, bad exit, wrong line count, transport
//! error) is retried once; a second failure aborts with an error naming
//! the batch's offset, so a long job points at the guilty slice of input.

mod command;
mod http;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toymt::LexTable;

/// Sentences per translation request unless `BackendSpec` overrides it.
pub const DEFAULT_BATCH_SIZE: usize = 32;

fn default_batch_size() -> usize {
    DEFAULT_BATCH_SIZE
}

/// How to reach a translator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Transport {
    /// Spawn `argv` per batch; line protocol over stdin/stdout.
    Command {
        argv: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timeout_secs: Option<u64>,
    },
    /// POST batches to `url`; line protocol over request/response bodies.
    Http {
        url: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timeout_secs: Option<u64>,
    },
    /// Greedy decode with the lexical table at `model`.
    Toy { model: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub id: String,
    /// Language this backend translates from.
    pub src: String,
    /// Language this backend translates to.
    pub tgt: String,
    pub transport: Transport,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
}

/// Environment variable that overrides the endpoint of an HTTP backend:
/// `DISTILLERY_BACKEND_<ID>_URL`, with the id upper-cased and
/// non-alphanumerics replaced by `_`.  Only endpoints can be overridden
/// this way; command lines and model paths always come from the
/// declared `BackendSpec`.
pub fn url_env_var(id: &str) -> String {
    let mangled: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_uppercase()
            } else {
                '_'
            }
        })
        .collect();
    format!("DISTILLERY_BACKEND_{mangled}_URL")
}

enum Runner {
    Command {
        argv: Vec<String>,
        timeout_secs: Option<u64>,
    },
    Http {
        url: String,
        timeout_secs: Option<u64>,
    },
    Toy(Box<LexTable>),
}

/// A ready-to-use translator.
pub struct Backend {
    spec: BackendSpec,
    runner: Runner,
}

impl Backend {
    pub fn new(spec: BackendSpec) -> Result<Backend> {
        if spec.batch_size == 0 {
            return Err(Error::Backend {
                id: spec.id.clone(),
                message: "batch size must be at least 1".into(),
            });
        }
        let runner = match &spec.transport {
            Transport::Command { argv, timeout_secs } => {
                if argv.is_empty() {
                    return Err(Error::Backend {
                        id: spec.id.clone(),
                        message: "empty command line".into(),
                    });
                }
                Runner::Command {
                    argv: argv.clone(),
                    timeout_secs: *timeout_secs,
                }
            }
            Transport::Http { url, timeout_secs } => {
                let url = match std::env::var(url_env_var(&spec.id)) {
                    Ok(v) if !v.is_empty() => {
                        log::info!("backend {}: endpoint overridden from environment", spec.id);
                        v
                    }
                    _ => url.clone(),
                };
                Runner::Http {
                    url,
                    timeout_secs: *timeout_secs,
                }
            }
            Transport::Toy { model } => Runner::Toy(Box::new(LexTable::load(model)?)),
        };
        Ok(Backend { spec, runner })
    }

    /// Wrap an already-loaded table, e.g. a model trained earlier in the
    /// same process.
    pub fn from_table(id: &str, src: &str, tgt: &str, table: LexTable) -> Backend {
        Backend {
            spec: BackendSpec {
                id: id.to_string(),
                src: src.to_string(),
                tgt: tgt.to_string(),
                transport: Transport::Toy {
                    model: PathBuf::new(),
                },
                batch_size: default_batch_size(),
            },
            runner: Runner::Toy(Box::new(table)),
        }
    }

    pub fn spec(&self) -> &BackendSpec {
        &self.spec
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    /// Translate sentences in order.  Output has exactly the input length.
    pub fn translate(&self, texts: &[String]) -> Result<Vec<String>> {
        for t in texts {
            if t.contains('\n') {
                return Err(Error::InvalidArg(
                    "sentence contains a newline; one sentence per line".into(),
                ));
            }
        }
        let mut out = Vec::with_capacity(texts.len());
        for (offset, batch) in texts
            .chunks(self.spec.batch_size)
            .enumerate()
            .map(|(i, b)| (i * self.spec.batch_size, b))
        {
            out.extend(self.run_batch_with_retry(offset, batch)?);
        }
        Ok(out)
    }

    /// Round-trip a single sentence to verify the backend is reachable
    /// and speaks the protocol.  Returns the translation.
    pub fn probe(&self) -> Result<String> {
        let mut out = self.translate(&["probe".to_string()])?;
        Ok(out.pop().expect("translate returned one line"))
    }

    fn run_batch_with_retry(&self, offset: usize, batch: &[String]) -> Result<Vec<String>> {
        match self.run_batch(batch) {
            Ok(lines) => Ok(lines),
            Err(first) => {
                log::warn!(
                    "backend {}: batch at offset {offset} failed ({first}), retrying",
                    self.spec.id
                );
                self.run_batch(batch).map_err(|second| Error::BackendBatch {
                    id: self.spec.id.clone(),
                    offset,
                    message: second.to_string(),
                })
            }
        }
    }

    fn run_batch(&self, batch: &[String]) -> Result<Vec<String>> {
        let lines = match &self.runner {
            Runner::Command { argv, timeout_secs } => {
                command::run(&self.spec.id, argv, *timeout_secs, batch)?
            }
            Runner::Http { url, timeout_secs } => {
                http::post_lines(&self.spec.id, url, *timeout_secs, batch)?
            }
            Runner::Toy(table) => batch.iter().map(|t| table.decode(t)).collect(),
        };
        if lines.len() != batch.len() {
            return Err(Error::Backend {
                id: self.spec.id.clone(),
                message: format!("sent {} lines, received {}", batch.len(), lines.len()),
            });
        }
        Ok(lines)
    }
}

/// Split a protocol payload into lines: strip one trailing newline, then
/// split.  An empty payload is zero lines; a lone newline is one empty
/// line.
fn split_payload(payload: &str) -> Vec<String> {
    if payload.is_empty() {
        return Vec::new();
    }
    let payload = payload.strip_suffix('\n').unwrap_or(payload);
    payload
        .split('\n')
        .map(|s| s.trim_end_matches('\r').to_string())
        .collect()
}
