//! Line-based text format for flow diagrams.
//!
//! ```text
//! diagram n=2 r=2
//! cell 0 0 kind=letter letter=1 x=0 y=0 sw=0 se=1 internal=[]
//! cell 0 1 kind=letter letter=-2 x=0 y=0 sw=-2 se=1 internal=[split(-1->-2,1)]
//! cell 1 0 kind=diamond x=1 y=-2 sw=-2 se=1 internal=[merge(1,-2->-1), split(-1->-2,1)]
//! OA: [1, 1]
//! OB: [0, 2]
//! TOP: [1, -1]
//! ```
//!
//! Letters are written by signed label. Kinds are `letter`, `diamond` (merge-split or cap-cup
//! through the sum of the inputs), `parallel` and `empty`. Outputs, internal vertices and
//! boundary lines are redundant and checked on input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Cell, Fill, FlowDiagram, GrowthError};
use crate::words::Letter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing header")]
    NoHeader,
    #[error("missing cell ({0},{1})")]
    MissingCell(usize, usize),
    #[error("{side} disagrees with the cells: expected {expected:?}, found {found:?}")]
    Boundary { side: String, expected: Vec<i32>, found: Vec<i32> },
    #[error(transparent)]
    Invalid(#[from] GrowthError),
}

fn list(v: &[i32]) -> String {
    let items: Vec<String> = v.iter().map(i32::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// Trivalent vertices and extrema inside a cell, in drawing order.
fn internal(c: &Cell) -> String {
    let (sw, se) = c.outputs();
    let mut v = Vec::new();
    match c.fill {
        Fill::Letter(l) => {
            let t = l.z_label().signum();
            if sw != 0 && se != 0 {
                v.push(format!("split({t}->{sw},{se})"));
            }
        }
        Fill::Through { .. } => {
            let m = c.x + c.y;
            if m == 0 {
                if c.x != 0 {
                    v.push(format!("cap({},{})", c.x, c.y));
                }
                if sw != 0 {
                    v.push(format!("cup({sw},{se})"));
                }
            } else {
                if c.x != 0 && c.y != 0 {
                    v.push(format!("merge({},{}->{m})", c.x, c.y));
                }
                if sw != 0 && se != 0 {
                    v.push(format!("split({m}->{sw},{se})"));
                }
            }
        }
        Fill::Parallel | Fill::Empty => {}
    }
    format!("[{}]", v.join(", "))
}

fn kind(f: &Fill) -> &'static str {
    match f {
        Fill::Letter(_) => "letter",
        Fill::Through { .. } => "diamond",
        Fill::Parallel => "parallel",
        Fill::Empty => "empty",
    }
}

pub(super) fn write(d: &FlowDiagram) -> String {
    let mut s = format!("diagram n={} r={}\n", d.n, d.r);
    for c in d.iter_cells() {
        let letter = match c.fill {
            Fill::Letter(l) => format!(" letter={}", l.z_label()),
            _ => String::new(),
        };
        let (sw, se) = c.outputs();
        let _ = writeln!(
            s,
            "cell {} {} kind={}{letter} x={} y={} sw={sw} se={se} internal={}",
            c.row,
            c.col,
            kind(&c.fill),
            c.x,
            c.y,
            internal(c)
        );
    }
    let _ = writeln!(s, "OA: {}", list(&d.oa_edges()));
    let _ = writeln!(s, "OB: {}", list(&d.ob_edges()));
    let _ = writeln!(s, "TOP: {}", list(&d.top()));
    s
}

fn field<T: std::str::FromStr>(tok: Option<&str>, key: &str, line: usize) -> Result<T, ParseError> {
    let bad = || ParseError::Syntax { line, reason: format!("expected {key}") };
    let tok = tok.ok_or_else(bad)?;
    let v = if key.is_empty() { tok } else { tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(bad)? };
    v.parse().map_err(|_| bad())
}

fn parse_list(s: &str, line: usize) -> Result<Vec<i32>, ParseError> {
    let bad = || ParseError::Syntax { line, reason: format!("bad list {s:?}") };
    let body = s.trim().strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(bad)?;
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

pub(super) fn parse(s: &str) -> Result<FlowDiagram, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut cells: BTreeMap<(usize, usize), Cell> = BTreeMap::new();
    let mut sides: Vec<(String, Vec<i32>)> = Vec::new();
    for (k, raw) in s.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut toks = t.split_whitespace();
        match toks.next() {
            Some("diagram") => {
                header = Some((field(toks.next(), "n", line)?, field(toks.next(), "r", line)?));
            }
            Some("cell") => {
                let row: usize = field(toks.next(), "", line)?;
                let col: usize = field(toks.next(), "", line)?;
                let kind: String = field(toks.next(), "kind", line)?;
                let letter = if kind == "letter" {
                    let z: i32 = field(toks.next(), "letter", line)?;
                    Some(Letter::from_z_label(z).ok_or(ParseError::Syntax { line, reason: "letter 0".into() })?)
                } else {
                    None
                };
                let x: i32 = field(toks.next(), "x", line)?;
                let y: i32 = field(toks.next(), "y", line)?;
                let sw: i32 = field(toks.next(), "sw", line)?;
                let se: i32 = field(toks.next(), "se", line)?;
                let rest: Vec<&str> = toks.collect();
                let vertices = rest.join(" ");
                let vertices = vertices.strip_prefix("internal=").ok_or(ParseError::Syntax { line, reason: "expected internal".into() })?;
                let fill = match (kind.as_str(), letter) {
                    ("letter", Some(l)) => Fill::Letter(l),
                    ("diamond", _) => Fill::Through { sw, se },
                    ("parallel", _) => Fill::Parallel,
                    ("empty", _) => Fill::Empty,
                    _ => return Err(ParseError::Syntax { line, reason: format!("unknown kind {kind:?}") }),
                };
                let cell = Cell { row, col, x, y, fill };
                if cell.outputs() != (sw, se) {
                    return Err(ParseError::Syntax { line, reason: format!("outputs sw={sw} se={se} do not match a {kind} cell") });
                }
                let expected = internal(&cell);
                if vertices != expected {
                    return Err(ParseError::Syntax { line, reason: format!("internal vertices {vertices} do not match {expected}") });
                }
                if cells.insert((row, col), cell).is_some() {
                    return Err(ParseError::Syntax { line, reason: format!("duplicate cell ({row},{col})") });
                }
            }
            Some(side @ ("OA:" | "OB:" | "TOP:")) => {
                let rest = t[side.len()..].to_string();
                sides.push((side.trim_end_matches(':').to_string(), parse_list(&rest, line)?));
            }
            _ => return Err(ParseError::Syntax { line, reason: format!("unrecognised line {t:?}") }),
        }
    }
    let (n, r) = header.ok_or(ParseError::NoHeader)?;
    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = Vec::with_capacity(r - i);
        for j in 0..r - i {
            row.push(cells.remove(&(i, j)).ok_or(ParseError::MissingCell(i, j))?);
        }
        rows.push(row);
    }
    if let Some((&(i, j), _)) = cells.iter().next() {
        return Err(ParseError::Invalid(GrowthError::NoCell { row: i, col: j, r }));
    }
    let d = FlowDiagram { n, r, cells: rows };
    d.validate()?;
    for (side, found) in sides {
        let expected = match side.as_str() {
            "OA" => d.oa_edges(),
            "OB" => d.ob_edges(),
            _ => d.top(),
        };
        if expected != found {
            return Err(ParseError::Boundary { side, expected, found });
        }
    }
    Ok(d)
}
