//! DIMACS-style edge lists: a `p edge N M` header followed by `M` lines
//! `e u v` with 1-based endpoints. Blank lines and `c` comment lines are
//! skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ddeg_core::{Graph, GraphBuilder};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing 'p edge N M' header")]
    MissingHeader,
    #[error("header announces {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn parse_err(line: usize, msg: impl Into<String>) -> DimacsError {
    DimacsError::Parse { line, msg: msg.into() }
}

pub fn parse(text: &str) -> Result<Graph, DimacsError> {
    let mut builder: Option<GraphBuilder> = None;
    let mut expected = 0;
    let mut found = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        match fields.next() {
            Some("p") => {
                if builder.is_some() {
                    return Err(parse_err(line, "second header"));
                }
                if fields.next() != Some("edge") {
                    return Err(parse_err(line, "expected 'p edge N M'"));
                }
                let n = number(fields.next(), line)?;
                expected = number(fields.next(), line)?;
                if fields.next().is_some() {
                    return Err(parse_err(line, "trailing fields in header"));
                }
                builder = Some(GraphBuilder::new(n));
            }
            Some("e") => {
                let b = builder.as_mut().ok_or(DimacsError::MissingHeader)?;
                let u = number(fields.next(), line)?;
                let v = number(fields.next(), line)?;
                if fields.next().is_some() {
                    return Err(parse_err(line, "trailing fields in edge"));
                }
                let n = b.n();
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(parse_err(line, format!("endpoint out of range 1..={n}")));
                }
                if u == v {
                    return Err(parse_err(line, format!("self-loop at {u}")));
                }
                if b.has_edge(u - 1, v - 1) {
                    return Err(parse_err(line, format!("duplicate edge {u} {v}")));
                }
                b.add_edge(u - 1, v - 1);
                found += 1;
            }
            Some(other) => return Err(parse_err(line, format!("unknown line type '{other}'"))),
            None => unreachable!("blank lines are skipped"),
        }
    }
    let builder = builder.ok_or(DimacsError::MissingHeader)?;
    if found != expected {
        return Err(DimacsError::EdgeCount { expected, found });
    }
    Ok(builder.build())
}

fn number(field: Option<&str>, line: usize) -> Result<usize, DimacsError> {
    let field = field.ok_or_else(|| parse_err(line, "missing number"))?;
    field.parse().map_err(|_| parse_err(line, format!("'{field}' is not a nonnegative integer")))
}

/// Header plus edges in increasing `(u, v)` order.
pub fn render(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p edge {} {}", g.n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

pub fn read(path: &Path) -> Result<Graph, DimacsError> {
    let text = fs::read_to_string(path).map_err(|source| DimacsError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

pub fn write(path: &Path, g: &Graph) -> Result<(), DimacsError> {
    fs::write(path, render(g)).map_err(|source| DimacsError::Io { path: path.display().to_string(), source })
}
