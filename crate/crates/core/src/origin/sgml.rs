//! Readers for origin-annotated test sets.
//!
//! The primary format is WMT-style SGML: `<doc docid="..." origlang="...">`
//! elements containing one `<seg>` per line.  The files in the wild are
//! not valid XML (unescaped ampersands, stray tags, inconsistent
//! casing), so this is a deliberately forgiving line scanner, not an XML
//! parser: doc attributes may come in any order, unknown tags are
//! ignored, and only `<seg>` content is collected.
//!
//! The fallback is a TSV mapping for plain text files: each line
//! `doc_id<TAB>origlang<TAB>start<TAB>end` claims an inclusive 1-based
//! line range of the accompanying sentence file.  Ranges must cover the
//! file exactly, in order, with no gaps or overlaps.

use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::origin::{Segment, TestSet};

fn doc_open_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?i)<doc\b([^>]*)>"#).unwrap())
}

fn seg_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?i)<seg\b[^>]*>(.*?)</seg>"#).unwrap())
}

fn attr_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"([\w.-]+)\s*=\s*"([^"]*)""#).unwrap())
}

fn unescape(text: &str) -> String {
    // &amp; last, so "&amp;lt;" ends up as the literal "&lt;"
    text.replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&")
}

/// Parse a WMT-style SGML test set file.
pub fn load_sgml(path: &Path) -> Result<TestSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, message: String| Error::TestSetFormat {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };

    let mut current: Option<(String, String)> = None; // (doc_id, origlang)
    let mut segments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(m) = doc_open_re().captures(line) {
            let attrs = &m[1];
            let mut doc_id = None;
            let mut origlang = None;
            for a in attr_re().captures_iter(attrs) {
                match a[1].to_ascii_lowercase().as_str() {
                    "docid" | "id" => doc_id = Some(a[2].to_string()),
                    "origlang" => origlang = Some(a[2].to_string()),
                    _ => {}
                }
            }
            let doc_id = doc_id.ok_or_else(|| bad(i + 1, "doc tag without docid".into()))?;
            let origlang = origlang.ok_or(Error::MissingOriglang {
                doc_id: doc_id.clone(),
            })?;
            current = Some((doc_id, origlang));
        }
        for m in seg_re().captures_iter(line) {
            let (doc_id, origlang) = current
                .clone()
                .ok_or_else(|| bad(i + 1, "seg outside of any doc".into()))?;
            let seg_text = unescape(m[1].trim());
            if seg_text.is_empty() {
                return Err(bad(i + 1, format!("empty seg in doc {doc_id:?}")));
            }
            segments.push(Segment {
                doc_id,
                origlang,
                text: seg_text,
            });
        }
    }
    if segments.is_empty() {
        return Err(Error::TestSetFormat {
            path: path.to_path_buf(),
            message: "no segments found".into(),
        });
    }
    Ok(TestSet { segments })
}

/// Parse a plain sentence file plus a TSV document map.
pub fn load_tsv(tsv_path: &Path, text_path: &Path) -> Result<TestSet> {
    let texts = std::fs::read_to_string(text_path).map_err(|source| Error::Io {
        path: text_path.to_path_buf(),
        source,
    })?;
    let lines: Vec<&str> = texts.lines().collect();
    for (i, l) in lines.iter().enumerate() {
        if l.trim().is_empty() {
            return Err(Error::TestSetFormat {
                path: text_path.to_path_buf(),
                message: format!("line {}: empty segment", i + 1),
            });
        }
    }

    let tsv = std::fs::read_to_string(tsv_path).map_err(|source| Error::Io {
        path: tsv_path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, message: String| Error::TestSetFormat {
        path: tsv_path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };

    let mut segments = Vec::new();
    let mut expected_start = 1usize;
    for (i, line) in tsv.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [doc_id, origlang, start, end] = fields[..] else {
            return Err(bad(
                i + 1,
                format!("expected 4 tab-separated fields, got {}", fields.len()),
            ));
        };
        let start: usize = start
            .trim()
            .parse()
            .map_err(|_| bad(i + 1, format!("bad start {start:?}")))?;
        let end: usize = end
            .trim()
            .parse()
            .map_err(|_| bad(i + 1, format!("bad end {end:?}")))?;
        if start == 0 || end < start {
            return Err(bad(i + 1, format!("bad range {start}..{end}")));
        }
        if start != expected_start {
            return Err(bad(
                i + 1,
                format!("range starts at {start}, expected {expected_start} (ranges must tile the file)"),
            ));
        }
        if end > lines.len() {
            return Err(bad(
                i + 1,
                format!("range ends at {end} but the file has {} lines", lines.len()),
            ));
        }
        for line_no in start..=end {
            segments.push(Segment {
                doc_id: doc_id.to_string(),
                origlang: origlang.to_string(),
                text: lines[line_no - 1].to_string(),
            });
        }
        expected_start = end + 1;
    }
    if segments.is_empty() {
        return Err(Error::TestSetFormat {
            path: tsv_path.to_path_buf(),
            message: "no document ranges".into(),
        });
    }
    if expected_start != lines.len() + 1 {
        return Err(Error::TestSetFormat {
            path: tsv_path.to_path_buf(),
            message: format!(
                "ranges cover {} of {} lines",
                expected_start - 1,
                lines.len()
            ),
        });
    }
    Ok(TestSet { segments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(path: &Path, content: &str) {
        std::fs::write(path, content).unwrap();
    }

    const FOUR_DOCS: &str = r#"<refset setid="toy" srclang="any" trglang="en">
<doc docid="doc-a" genre="news" origlang="tr">
<p>
<seg id="1">first segment of doc a</seg>
<seg id="2">second segment of doc a</seg>
</p>
</doc>
<doc origlang="tr" docid="doc-b">
<seg id="1">first segment of doc b</seg>
<seg id="2">second segment of doc b</seg>
</doc>
<DOC docid="doc-c" origlang="en">
<seg id="1">first segment of doc c</seg>
<seg id="2">second &amp; final segment of doc c</seg>
</DOC>
<doc docid="doc-d" origlang="cs">
<seg id="1">first segment of doc d</seg>
<seg id="2">second segment of doc d</seg>
</doc>
</refset>
"#;

    #[test]
    fn parses_docs_segids_and_entities() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("set.sgm");
        write(&p, FOUR_DOCS);
        let ts = load_sgml(&p).unwrap();
        assert_eq!(ts.segments.len(), 8);
        assert_eq!(ts.segments[0].doc_id, "doc-a");
        assert_eq!(ts.segments[0].origlang, "tr");
        assert_eq!(ts.segments[3].doc_id, "doc-b");
        assert_eq!(ts.segments[5].text, "second & final segment of doc c");
        assert_eq!(ts.segments[7].origlang, "cs");
    }

    #[test]
    fn attribute_order_and_tag_case_do_not_matter() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("set.sgm");
        write(
            &p,
            "<doc origlang=\"de\" docid=\"x\">\n<SEG id=\"1\">hallo welt</SEG>\n</doc>\n",
        );
        let ts = load_sgml(&p).unwrap();
        assert_eq!(ts.segments[0].origlang, "de");
        assert_eq!(ts.segments[0].text, "hallo welt");
    }

    #[test]
    fn missing_origlang_names_the_doc() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("set.sgm");
        write(
            &p,
            "<doc docid=\"nolang\">\n<seg id=\"1\">text</seg>\n</doc>\n",
        );
        match load_sgml(&p).unwrap_err() {
            Error::MissingOriglang { doc_id } => assert_eq!(doc_id, "nolang"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn seg_outside_doc_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("set.sgm");
        write(&p, "<seg id=\"1\">floating</seg>\n");
        assert!(load_sgml(&p).is_err());
    }

    #[test]
    fn empty_file_and_empty_segs_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("set.sgm");
        write(&p, "<srcset>\n</srcset>\n");
        assert!(load_sgml(&p).is_err());
        write(
            &p,
            "<doc docid=\"d\" origlang=\"en\">\n<seg id=\"1\"> </seg>\n</doc>\n",
        );
        assert!(load_sgml(&p).is_err());
    }

    #[test]
    fn tsv_assigns_ranges_to_docs() {
        let dir = tempfile::tempdir().unwrap();
        let txt = dir.path().join("refs.txt");
        let tsv = dir.path().join("docs.tsv");
        write(&txt, "one\ntwo\nthree\nfour\nfive\n");
        write(&tsv, "doc-a\ttr\t1\t3\ndoc-b\ten\t4\t5\n");
        let ts = load_tsv(&tsv, &txt).unwrap();
        assert_eq!(ts.segments.len(), 5);
        assert_eq!(ts.segments[2].doc_id, "doc-a");
        assert_eq!(ts.segments[3].origlang, "en");
        assert_eq!(ts.segments[4].text, "five");
    }

    #[test]
    fn tsv_ranges_must_tile_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let txt = dir.path().join("refs.txt");
        let tsv = dir.path().join("docs.tsv");
        write(&txt, "one\ntwo\nthree\n");
        for bad in [
            "doc-a\ttr\t1\t1\ndoc-b\ten\t3\t3\n", // gap at 2
            "doc-a\ttr\t1\t2\ndoc-b\ten\t2\t3\n", // overlap at 2
            "doc-a\ttr\t1\t2\n",                  // leaves 3 uncovered
            "doc-a\ttr\t2\t3\n",                  // does not start at 1
            "doc-a\ttr\t1\t4\n",                  // past the end
            "doc-a\ttr\t0\t3\n",                  // zero start
            "doc-a\ttr\t3\t1\n",                  // inverted
            "doc-a\ttr\t1\n",                     // missing field
        ] {
            write(&tsv, bad);
            assert!(load_tsv(&tsv, &txt).is_err(), "accepted {bad:?}");
        }
        write(&tsv, "doc-a\ttr\t1\t2\ndoc-b\ten\t3\t3\n");
        assert!(load_tsv(&tsv, &txt).is_ok());
    }

    #[test]
    fn tsv_rejects_blank_segments() {
        let dir = tempfile::tempdir().unwrap();
        let txt = dir.path().join("refs.txt");
        let tsv = dir.path().join("docs.tsv");
        write(&txt, "one\n\nthree\n");
        write(&tsv, "doc-a\ttr\t1\t3\n");
        assert!(load_tsv(&tsv, &txt).is_err());
    }
}
