//! Newline-delimited JSON client for an external completion server.
//!
//! Each request line is `{"id", "role", "prompt_text"}`; the server answers
//! with `{"id", "completion"}` lines in any order. Items that time out or
//! come back malformed are returned as empty completions.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::prompt::{PromptRecord, Role};
use crate::kernel::RuleLibrary;

#[derive(Debug, thiserror::Error)]
#[error("endpoint {endpoint} unreachable: {source}")]
pub struct TransportError {
    pub endpoint: String,
    pub source: std::io::Error,
}

#[derive(Serialize)]
struct Request<'a> {
    id: usize,
    role: Role,
    prompt_text: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: usize,
    completion: String,
}

pub fn external_generate(
    library: &RuleLibrary,
    batch: &[PromptRecord],
    endpoint: &str,
    timeout: Duration,
) -> Result<Vec<String>, TransportError> {
    let unreachable = |source| TransportError { endpoint: endpoint.to_string(), source };
    let addr = endpoint
        .to_socket_addrs()
        .map_err(unreachable)?
        .next()
        .ok_or_else(|| unreachable(std::io::Error::new(std::io::ErrorKind::NotFound, "no address")))?;
    let mut stream = TcpStream::connect_timeout(&addr, timeout).map_err(unreachable)?;

    let mut out = vec![String::new(); batch.len()];
    if batch.is_empty() {
        return Ok(out);
    }
    let mut payload = String::new();
    for (id, prompt) in batch.iter().enumerate() {
        let text = prompt.render(library);
        let line = serde_json::to_string(&Request { id, role: prompt.role, prompt_text: &text }).expect("plain data serializes");
        payload.push_str(&line);
        payload.push('\n');
    }
    if let Err(e) = stream.write_all(payload.as_bytes()).and_then(|_| stream.flush()) {
        log::warn!("external generator write failed: {e}");
        return Ok(out);
    }
    if stream.set_read_timeout(Some(timeout)).is_err() {
        return Ok(out);
    }

    let mut answered = 0;
    let mut seen = vec![false; batch.len()];
    for line in BufReader::new(stream).lines() {
        let Ok(line) = line else { break };
        match serde_json::from_str::<Response>(&line) {
            Ok(r) if r.id < batch.len() && !seen[r.id] => {
                seen[r.id] = true;
                out[r.id] = r.completion;
                answered += 1;
                if answered == batch.len() {
                    break;
                }
            }
            _ => log::debug!("ignoring malformed external response: {line}"),
        }
    }
    Ok(out)
}
