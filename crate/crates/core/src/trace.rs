//! Line-oriented update traces.
//!
//! ```text
//! # comment
//! n 8
//! + 0 1
//! - 0 1
//! ```
//!
//! The header `n <count>` must be the first non-comment line. Blank lines and
//! `#` lines are ignored. [`UpdateTrace::to_text`] emits the canonical form
//! (no comments, one event per line, trailing newline), and parsing that form
//! and writing it again reproduces it byte for byte.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::graph::{DynamicGraph, EdgeOp, GraphError, UpdateEvent};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: invalid event: {source}")]
    Invalid { line: usize, source: GraphError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateTrace {
    pub n: usize,
    pub events: Vec<UpdateEvent>,
}

impl UpdateTrace {
    pub fn new(n: usize) -> Self {
        UpdateTrace { n, events: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Replays the trace from the empty graph; the error carries the 1-based
    /// event index.
    pub fn validate(&self) -> Result<DynamicGraph, TraceError> {
        let mut g = DynamicGraph::new(self.n);
        for (i, ev) in self.events.iter().enumerate() {
            g.apply(ev).map_err(|source| TraceError::Invalid { line: i + 1, source })?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.events.len() * 12);
        writeln!(out, "n {}", self.n).unwrap();
        for ev in &self.events {
            let sign = match ev.op {
                EdgeOp::Insert => '+',
                EdgeOp::Delete => '-',
            };
            writeln!(out, "{sign} {} {}", ev.u, ev.v).unwrap();
        }
        out
    }

    /// Parses and validates a trace. Errors name the offending source line.
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut n: Option<usize> = None;
        let mut events = Vec::new();
        let mut graph = DynamicGraph::new(0);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let mut parts = s.split_whitespace();
            let head = parts.next().unwrap_or_default();
            let perr = |msg: String| TraceError::Parse { line, msg };
            match n {
                None => {
                    if head != "n" {
                        return Err(perr(format!("expected header `n <count>`, found `{s}`")));
                    }
                    let count = parse_int(parts.next(), "vertex count").map_err(perr)?;
                    if parts.next().is_some() {
                        return Err(perr("trailing tokens after header".into()));
                    }
                    n = Some(count);
                    graph = DynamicGraph::new(count);
                }
                Some(_) => {
                    let op = match head {
                        "+" => EdgeOp::Insert,
                        "-" => EdgeOp::Delete,
                        other => return Err(perr(format!("unknown event kind `{other}`"))),
                    };
                    let u = parse_int(parts.next(), "endpoint").map_err(perr)?;
                    let v = parse_int(parts.next(), "endpoint").map_err(perr)?;
                    if parts.next().is_some() {
                        return Err(perr("trailing tokens after event".into()));
                    }
                    let ev = UpdateEvent { op, u, v };
                    graph.apply(&ev).map_err(|source| TraceError::Invalid { line, source })?;
                    events.push(ev);
                }
            }
        }
        let n = n.ok_or(TraceError::Parse { line: 0, msg: "missing header `n <count>`".into() })?;
        Ok(UpdateTrace { n, events })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_int(tok: Option<&str>, what: &str) -> Result<usize, String> {
    let tok = tok.ok_or_else(|| format!("missing {what}"))?;
    tok.parse().map_err(|_| format!("bad {what} `{tok}`"))
}
