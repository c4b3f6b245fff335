use crate::actors::{ActorId, Args, Server};
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};

/// One executed message. `state_digest` is the canonical digest of the state
/// after the step, as 16 hex digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub time_ms: i64,
    pub actor: ActorId,
    pub server: Server,
    pub args: Args,
    pub branch: u32,
    pub state_digest: String,
}

/// Writes one JSON object per line.
pub fn write_trace(mut out: impl Write, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_trace(input: impl BufRead) -> io::Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("trace line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
