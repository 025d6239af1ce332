//! External-command transport: one process per batch, line protocol on
//! stdin/stdout.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Spawn `argv`, feed it `batch` (one sentence per line, final newline),
/// and collect its stdout lines.  The pipes are serviced on threads so a
/// child that interleaves reading and writing (like `cat` on a large
/// batch) cannot deadlock against us.  With a timeout set, a child that
/// outlives it is killed and reported as timed out.
pub fn run(
    id: &str,
    argv: &[String],
    timeout_secs: Option<u64>,
    batch: &[String],
) -> Result<Vec<String>> {
    let fail = |message: String| Error::Backend {
        id: id.to_string(),
        message,
    };

    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| fail(format!("failed to spawn {:?}: {e}", argv[0])))?;

    let mut payload = String::new();
    for line in batch {
        payload.push_str(line);
        payload.push('\n');
    }

    let mut stdin = child.stdin.take().expect("stdin piped");
    // a child may exit before reading everything; the write error that
    // causes is not the interesting failure, the exit status is
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(payload.as_bytes());
    });

    let mut stdout = child.stdout.take().expect("stdout piped");
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let mut stderr = child.stderr.take().expect("stderr piped");
    let err_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let deadline = timeout_secs.map(|s| Instant::now() + Duration::from_secs(s));
    let mut timed_out = false;
    let status = loop {
        match child
            .try_wait()
            .map_err(|e| fail(format!("wait failed: {e}")))?
        {
            Some(status) => break status,
            None => {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        let _ = child.kill();
                        timed_out = true;
                        break child
                            .wait()
                            .map_err(|e| fail(format!("wait failed: {e}")))?;
                    }
                }
                std::thread::sleep(Duration::from_millis(5));
            }
        }
    };

    if timed_out {
        // deliberately not joining the pipe threads: the child is dead,
        // but something it spawned may still hold the pipes open
        return Err(fail(format!(
            "timed out after {}s",
            timeout_secs.expect("timeout was set")
        )));
    }
    let out = reader.join().expect("stdout reader");
    let err = err_reader.join().expect("stderr reader");
    writer.join().expect("stdin writer");
    if !status.success() {
        let mut message = format!("{:?} exited with {status}", argv[0]);
        let err_text = String::from_utf8_lossy(&err);
        let err_text = err_text.trim();
        if !err_text.is_empty() {
            let short: String = err_text.chars().take(500).collect();
            message.push_str(&format!("; stderr: {short}"));
        }
        return Err(fail(message));
    }

    let text = String::from_utf8(out).map_err(|_| fail("stdout is not valid UTF-8".into()))?;
    Ok(super::split_payload(&text))
}
