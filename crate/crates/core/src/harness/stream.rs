//! Plain-text relevance streams.
//!
//! ```text
//! m=4 n=1 T=3
//! 1 0 0 1
//! 0 0 1 1
//! 1 1 0 0
//! ```

use std::io::{BufRead, Write};

use crate::error::{RankError, Result};
use crate::relevance::RelevanceVector;

/// Header fields of a stream file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub m: usize,
    pub n: u32,
    pub horizon: usize,
}

fn parse_header(line: &str) -> Result<StreamHeader> {
    let bad =
        || RankError::MalformedStream(format!("expected `m=<int> n=<int> T=<int>`, got `{line}`"));
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [m, n, t] = fields.as_slice() else {
        return Err(bad());
    };
    let value = |field: &str, key: &str| -> Result<usize> {
        field
            .strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)
    };
    let header = StreamHeader {
        m: value(m, "m")?,
        n: value(n, "n")? as u32,
        horizon: value(t, "T")?,
    };
    if header.m == 0 || header.n == 0 {
        return Err(RankError::MalformedStream(
            "m and n must be positive".into(),
        ));
    }
    Ok(header)
}

pub fn read_stream<R: BufRead>(input: R) -> Result<(StreamHeader, Vec<RelevanceVector>)> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => parse_header(line?.trim())?,
        None => return Err(RankError::MalformedStream("empty stream file".into())),
    };
    let mut stream = Vec::with_capacity(header.horizon);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let levels = line
            .split_whitespace()
            .map(|tok| tok.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| RankError::MalformedStream(format!("line {}: {e}", i + 2)))?;
        if levels.len() != header.m {
            return Err(RankError::MalformedStream(format!(
                "line {}: expected {} levels, found {}",
                i + 2,
                header.m,
                levels.len()
            )));
        }
        stream.push(RelevanceVector::new(levels, header.n)?);
    }
    if stream.len() != header.horizon {
        return Err(RankError::MalformedStream(format!(
            "header declares T={} but {} rounds follow",
            header.horizon,
            stream.len()
        )));
    }
    Ok((header, stream))
}

pub fn write_stream<W: Write>(mut out: W, n: u32, stream: &[RelevanceVector]) -> Result<()> {
    let m = stream.first().map_or(0, |r| r.len());
    writeln!(out, "m={m} n={n} T={}", stream.len())?;
    for r in stream {
        if r.len() != m {
            return Err(RankError::DimensionMismatch {
                expected: m,
                found: r.len(),
            });
        }
        let line: Vec<String> = r.levels().iter().map(u32::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}
