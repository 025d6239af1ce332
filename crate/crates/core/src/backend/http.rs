//! HTTP transport: POST a batch as a text/plain body, read translated
//! lines back.
//!
//! The client is a deliberately small HTTP/1.0 implementation over
//! `TcpStream`: it sends `Connection: close` and reads the response to
//! EOF, which sidesteps keep-alive and chunked framing entirely (a
//! server must not send chunked bodies to a 1.0 client).  That is all a
//! line-batch protocol needs, and it keeps the dependency footprint at
//! zero.

use std::io::{Read, Write};
use std::net::TcpStream;
use std::time::Duration;

use crate::error::{Error, Result};

struct Url<'a> {
    /// `host` or `host:port`, as it appears after the scheme.
    authority: &'a str,
    path: &'a str,
}

fn parse_url(url: &str) -> Option<Url<'_>> {
    let rest = url.strip_prefix("http://")?;
    let (authority, path) = match rest.find('/') {
        Some(i) => (&rest[..i], &rest[i..]),
        None => (rest, "/"),
    };
    if authority.is_empty() {
        return None;
    }
    Some(Url { authority, path })
}

pub fn post_lines(
    id: &str,
    url: &str,
    timeout_secs: Option<u64>,
    batch: &[String],
) -> Result<Vec<String>> {
    let fail = |message: String| Error::Backend {
        id: id.to_string(),
        message,
    };

    if url.starts_with("https://") {
        return Err(fail("https endpoints are not supported; use http".into()));
    }
    let parsed = parse_url(url).ok_or_else(|| fail(format!("malformed url {url:?}")))?;
    let addr = if parsed.authority.contains(':') {
        parsed.authority.to_string()
    } else {
        format!("{}:80", parsed.authority)
    };

    let mut body = String::new();
    for line in batch {
        body.push_str(line);
        body.push('\n');
    }

    let timeout = timeout_secs.map(Duration::from_secs);
    let stream = match timeout {
        Some(t) => {
            let sockaddr = std::net::ToSocketAddrs::to_socket_addrs(&addr)
                .map_err(|e| fail(format!("cannot resolve {addr}: {e}")))?
                .next()
                .ok_or_else(|| fail(format!("cannot resolve {addr}")))?;
            TcpStream::connect_timeout(&sockaddr, t)
        }
        None => TcpStream::connect(&addr),
    }
    .map_err(|e| fail(format!("connect to {addr} failed: {e}")))?;
    stream
        .set_read_timeout(timeout)
        .and_then(|_| stream.set_write_timeout(timeout))
        .map_err(|e| fail(format!("socket setup failed: {e}")))?;

    let mut stream = stream;
    let request = format!(
        "POST {} HTTP/1.0\r\nHost: {}\r\nContent-Type: text/plain; charset=utf-8\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        parsed.path,
        parsed.authority,
        body.len()
    );
    stream
        .write_all(request.as_bytes())
        .and_then(|_| stream.write_all(body.as_bytes()))
        .map_err(|e| fail(format!("request write failed: {e}")))?;

    let mut response = Vec::new();
    stream
        .read_to_end(&mut response)
        .map_err(|e| fail(format!("response read failed: {e}")))?;

    let header_end = find_header_end(&response)
        .ok_or_else(|| fail("response has no header/body separator".into()))?;
    let head = String::from_utf8_lossy(&response[..header_end]);
    let mut lines = head.split("\r\n");
    let status_line = lines.next().unwrap_or("");
    let mut parts = status_line.splitn(3, ' ');
    let proto = parts.next().unwrap_or("");
    let code = parts.next().unwrap_or("");
    if !proto.starts_with("HTTP/") {
        return Err(fail(format!("not an HTTP response: {status_line:?}")));
    }
    if code != "200" {
        return Err(fail(format!("endpoint answered {status_line:?}")));
    }
    let mut content_length = None;
    for header in lines {
        if let Some((name, value)) = header.split_once(':') {
            let name = name.trim().to_ascii_lowercase();
            let value = value.trim();
            if name == "transfer-encoding" && value.eq_ignore_ascii_case("chunked") {
                return Err(fail("chunked responses are not supported".into()));
            }
            if name == "content-length" {
                content_length = value.parse::<usize>().ok();
            }
        }
    }

    let mut body = &response[header_end + 4..];
    if let Some(len) = content_length {
        if body.len() < len {
            return Err(fail(format!("short body: {} of {} bytes", body.len(), len)));
        }
        body = &body[..len];
    }
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| fail("response body is not valid UTF-8".into()))?;
    Ok(super::split_payload(&text))
}

fn find_header_end(data: &[u8]) -> Option<usize> {
    data.windows(4).position(|w| w == b"\r\n\r\n")
}
