//! Sentence files and their metadata sidecars.
//!
//! A corpus side lives in a plain UTF-8 text file, one sentence per line.
//! Provenance rides along in `<file>.meta.jsonl`, one JSON object per
//! sentence: `{"origin_lang":"en","provenance":{"kind":"machine","depth":1,
//! "producer":"teacher"}}`.  The sidecar is optional on load — without it
//! every sentence is assumed natively authored in the file's language —
//! and always written on save.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{MonoCorpus, PairRecord, ParallelCorpus, Provenance, SideRecord};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct SideMeta {
    origin_lang: String,
    provenance: Provenance,
}

/// Sidecar path for a sentence file: `corpus.de` -> `corpus.de.meta.jsonl`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(".meta.jsonl");
    PathBuf::from(name)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut data: &[u8] = &bytes;
    if data.last() == Some(&b'\n') {
        data = &data[..data.len() - 1];
    }
    if data.is_empty() {
        return Ok(Vec::new());
    }
    data.split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            String::from_utf8(raw.to_vec()).map_err(|_| Error::InvalidUtf8 {
                path: path.to_path_buf(),
                line: i + 1,
            })
        })
        .collect()
}

fn read_sidecar(path: &Path, expected: usize) -> Result<Option<Vec<SideMeta>>> {
    let sidecar = sidecar_path(path);
    if !sidecar.exists() {
        return Ok(None);
    }
    let lines = read_lines(&sidecar)?;
    let metas: Vec<SideMeta> = lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Format {
                path: sidecar.clone(),
                message: format!("line {}: {e}", i + 1),
            })
        })
        .collect::<Result<_>>()?;
    for (i, m) in metas.iter().enumerate() {
        let machine = m.provenance.kind == super::ProvenanceKind::Machine;
        if machine != (m.provenance.depth >= 1) {
            return Err(Error::Format {
                path: sidecar.clone(),
                message: format!(
                    "line {}: kind {:?} inconsistent with depth {}",
                    i + 1,
                    m.provenance.kind,
                    m.provenance.depth
                ),
            });
        }
    }
    if metas.len() != expected {
        return Err(Error::Format {
            path: sidecar,
            message: format!("{} metadata lines for {} sentences", metas.len(), expected),
        });
    }
    Ok(Some(metas))
}

fn to_records(lang: &str, texts: Vec<String>, metas: Option<Vec<SideMeta>>) -> Vec<SideRecord> {
    match metas {
        Some(metas) => texts
            .into_iter()
            .zip(metas)
            .map(|(text, m)| SideRecord {
                text,
                origin_lang: m.origin_lang,
                provenance: m.provenance,
            })
            .collect(),
        None => texts
            .into_iter()
            .map(|text| SideRecord::natural(text, lang))
            .collect(),
    }
}

/// Load a monolingual corpus.  Blank lines are skipped with a warning; a
/// sidecar, if present, must align with the non-blank lines.
pub fn load_mono(path: &Path, lang: &str) -> Result<MonoCorpus> {
    let mut texts = Vec::new();
    for (i, line) in read_lines(path)?.into_iter().enumerate() {
        if line.trim().is_empty() {
            log::warn!("{}: skipping blank line {}", path.display(), i + 1);
        } else {
            texts.push(line);
        }
    }
    let metas = read_sidecar(path, texts.len())?;
    Ok(MonoCorpus {
        lang: lang.to_string(),
        records: to_records(lang, texts, metas),
    })
}

/// Load a parallel corpus from two aligned sentence files.  Blank lines
/// are errors here: silently dropping one side would shift the alignment.
pub fn load_parallel(
    src_path: &Path,
    tgt_path: &Path,
    src_lang: &str,
    tgt_lang: &str,
) -> Result<ParallelCorpus> {
    let src_lines = read_lines(src_path)?;
    let tgt_lines = read_lines(tgt_path)?;
    for (path, lines) in [(src_path, &src_lines), (tgt_path, &tgt_lines)] {
        if let Some(i) = lines.iter().position(|l| l.trim().is_empty()) {
            return Err(Error::BlankLine {
                path: path.to_path_buf(),
                line: i + 1,
            });
        }
    }
    if src_lines.len() != tgt_lines.len() {
        return Err(Error::LengthMismatch {
            left: src_lines.len(),
            right: tgt_lines.len(),
        });
    }
    let n = src_lines.len();
    let src = to_records(src_lang, src_lines, read_sidecar(src_path, n)?);
    let tgt = to_records(tgt_lang, tgt_lines, read_sidecar(tgt_path, n)?);
    Ok(ParallelCorpus {
        src_lang: src_lang.to_string(),
        tgt_lang: tgt_lang.to_string(),
        pairs: src
            .into_iter()
            .zip(tgt)
            .map(|(src, tgt)| PairRecord { src, tgt })
            .collect(),
    })
}

fn write_side(path: &Path, records: &[&SideRecord]) -> Result<()> {
    let mut text = String::new();
    let mut meta = String::new();
    for r in records {
        text.push_str(&r.text);
        text.push('\n');
        let m = SideMeta {
            origin_lang: r.origin_lang.clone(),
            provenance: r.provenance.clone(),
        };
        meta.push_str(&serde_json::to_string(&m).expect("sidecar serialization"));
        meta.push('\n');
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let sidecar = sidecar_path(path);
    fs::write(&sidecar, meta).map_err(|source| Error::Io {
        path: sidecar,
        source,
    })?;
    Ok(())
}

pub fn save_mono(corpus: &MonoCorpus, path: &Path) -> Result<()> {
    let refs: Vec<&SideRecord> = corpus.records.iter().collect();
    write_side(path, &refs)
}

pub fn save_parallel(corpus: &ParallelCorpus, src_path: &Path, tgt_path: &Path) -> Result<()> {
    let src: Vec<&SideRecord> = corpus.pairs.iter().map(|p| &p.src).collect();
    let tgt: Vec<&SideRecord> = corpus.pairs.iter().map(|p| &p.tgt).collect();
    write_side(src_path, &src)?;
    write_side(tgt_path, &tgt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ProvenanceKind;

    #[test]
    fn mono_round_trip_keeps_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.en");
        let mut c = MonoCorpus::from_lines("en", ["hello there", "general kenobi"]);
        c.records[1].origin_lang = "de".into();
        c.records[1].provenance = Provenance::human().translated_by("mt1");
        save_mono(&c, &path).unwrap();
        let back = load_mono(&path, "en").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn missing_sidecar_defaults_to_native_text() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.de");
        fs::write(&path, "guten tag\nwie geht es\n").unwrap();
        let c = load_mono(&path, "de").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.records[0].origin_lang, "de");
        assert_eq!(c.records[0].provenance, Provenance::natural());
    }

    #[test]
    fn mono_skips_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.de");
        fs::write(&path, "eins\n\nzwei\n   \ndrei\n").unwrap();
        let c = load_mono(&path, "de").unwrap();
        assert_eq!(c.texts().collect::<Vec<_>>(), ["eins", "zwei", "drei"]);
    }

    #[test]
    fn parallel_blank_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let s = dir.path().join("c.de");
        let t = dir.path().join("c.en");
        fs::write(&s, "eins\n\ndrei\n").unwrap();
        fs::write(&t, "one\ntwo\nthree\n").unwrap();
        let err = load_parallel(&s, &t, "de", "en").unwrap_err();
        match err {
            Error::BlankLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parallel_length_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let s = dir.path().join("c.de");
        let t = dir.path().join("c.en");
        fs::write(&s, "eins\nzwei\n").unwrap();
        fs::write(&t, "one\n").unwrap();
        assert!(matches!(
            load_parallel(&s, &t, "de", "en").unwrap_err(),
            Error::LengthMismatch { left: 2, right: 1 }
        ));
    }

    #[test]
    fn parallel_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = dir.path().join("c.de");
        let t = dir.path().join("c.en");
        let mut c =
            ParallelCorpus::from_lines("de", "en", ["eins", "zwei"], ["one", "two"]).unwrap();
        c.pairs[0].tgt.provenance = Provenance::natural().translated_by("teacher");
        c.pairs[0].tgt.origin_lang = "de".into();
        save_parallel(&c, &s, &t).unwrap();
        assert_eq!(load_parallel(&s, &t, "de", "en").unwrap(), c);
    }

    #[test]
    fn sidecar_length_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.en");
        fs::write(&path, "one\ntwo\n").unwrap();
        fs::write(
            sidecar_path(&path),
            "{\"origin_lang\":\"en\",\"provenance\":{\"kind\":\"natural\",\"depth\":0}}\n",
        )
        .unwrap();
        assert!(matches!(load_mono(&path, "en"), Err(Error::Format { .. })));
    }

    #[test]
    fn sidecar_depth_kind_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.en");
        fs::write(&path, "one\n").unwrap();
        fs::write(
            sidecar_path(&path),
            "{\"origin_lang\":\"en\",\"provenance\":{\"kind\":\"machine\",\"depth\":0}}\n",
        )
        .unwrap();
        assert!(matches!(load_mono(&path, "en"), Err(Error::Format { .. })));
    }

    #[test]
    fn sidecar_kinds_use_short_names() {
        let m = SideMeta {
            origin_lang: "en".into(),
            provenance: Provenance {
                kind: ProvenanceKind::Machine,
                depth: 2,
                producer: Some("rt".into()),
            },
        };
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            "{\"origin_lang\":\"en\",\"provenance\":{\"kind\":\"machine\",\"depth\":2,\"producer\":\"rt\"}}"
        );
    }

    #[test]
    fn invalid_utf8_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.en");
        fs::write(&path, b"ok\n\xff\xfe\n").unwrap();
        match load_mono(&path, "en").unwrap_err() {
            Error::InvalidUtf8 { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
