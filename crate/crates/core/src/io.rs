//! Plain-text file formats.
//!
//! Graph files hold `n k` followed by `nk` lines `u v` (1-based directed
//! edges). Realization files hold `dimension d` followed by one line
//! `vertex c_1 ... c_d` per vertex, coordinates as `p/q` fractions or
//! decimals. Run reports are `key=value` lines. `#` starts a comment in the
//! two input formats.

use std::fmt::Write as _;

use num::rational::BigRational;
use num::ToPrimitive;
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError};
use crate::oracle::{Provenance, Realization};
use crate::points::{format_rational, parse_rational, Coordinates, PointError, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid points: {0}")]
    Points(#[from] PointError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<DirectedGraph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "empty graph file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, k] = fields[..] else {
        return Err(syntax(hl, "expected header `n k`"));
    };
    let n = parse_usize(hl, n, "vertex count")?;
    let k = parse_usize(hl, k, "degree")?;
    let mut edges = Vec::with_capacity(n * k);
    let mut last = hl;
    for (ln, line) in lines {
        last = ln;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = fields[..] else {
            return Err(syntax(ln, "expected edge `u v`"));
        };
        let u = parse_usize(ln, u, "vertex id")?;
        let v = parse_usize(ln, v, "vertex id")?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(syntax(ln, format!("vertex id out of range 1..={n}")));
        }
        edges.push((u - 1, v - 1));
    }
    if edges.len() != n * k {
        return Err(syntax(last, format!("expected {} edges, found {}", n * k, edges.len())));
    }
    Ok(DirectedGraph::new(n, k, edges)?)
}

pub fn emit_graph(g: &DirectedGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.k());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

/// How coordinates in a realization file are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NumberMode {
    /// Every literal becomes an exact rational.
    #[default]
    Exact,
    /// Literals are read as `f64` and compared with a relative margin.
    Float,
}

/// Reads a realization file into an identity realization whose point `v`
/// belongs to vertex `v`. Vertex lines may come in any order but must cover
/// `1..=n` exactly once.
pub fn parse_realization(text: &str, mode: NumberMode) -> Result<Realization, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "empty realization file"))?;
    let d = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["dimension", d] => parse_usize(hl, d, "dimension")?,
        _ => return Err(syntax(hl, "expected header `dimension <d>`")),
    };
    let mut rows: Vec<(usize, usize, Vec<&str>)> = Vec::new();
    for (ln, line) in lines {
        let mut fields = line.split_whitespace();
        let id = parse_usize(ln, fields.next().unwrap_or(""), "vertex id")?;
        let coords: Vec<&str> = fields.collect();
        if coords.len() != d {
            return Err(syntax(ln, format!("expected {d} coordinates, found {}", coords.len())));
        }
        rows.push((ln, id, coords));
    }
    let n = rows.len();
    let mut slot: Vec<Option<Vec<&str>>> = vec![None; n];
    for (ln, id, coords) in rows {
        if id == 0 || id > n {
            return Err(syntax(ln, format!("vertex id {id} out of range 1..={n}")));
        }
        if slot[id - 1].replace(coords).is_some() {
            return Err(syntax(ln, format!("vertex {id} listed twice")));
        }
    }
    let slot: Vec<Vec<&str>> = slot.into_iter().map(|s| s.expect("ids are a bijection")).collect();
    let points = match mode {
        NumberMode::Exact => {
            let rows = slot
                .iter()
                .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| syntax(hl, e.to_string()))?;
            PointSet::exact(d, rows)?
        }
        NumberMode::Float => {
            let rows = slot
                .iter()
                .map(|c| c.iter().map(|s| parse_float(s)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| syntax(hl, "unparseable coordinate"))?;
            PointSet::float(d, rows)?
        }
    };
    Ok(Realization::identity(points, Provenance::UserSupplied))
}

fn parse_float(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some(_) => parse_rational(s).ok()?.to_f64(),
        None => s.parse().ok(),
    }
}

/// Writes one line per vertex in id order. Exact coordinates are written as
/// reduced fractions, so parsing the output gives back the same rationals.
pub fn emit_realization(r: &Realization) -> String {
    let points = &r.points;
    let d = points.dim();
    let mut out = format!("dimension {d}\n");
    for (v, &p) in r.assignment.iter().enumerate() {
        let _ = write!(out, "{}", v + 1);
        match points.coordinates() {
            Coordinates::Exact(c) => {
                for x in &c[p * d..(p + 1) * d] {
                    let _ = write!(out, " {}", format_rational(x));
                }
            }
            Coordinates::Float { values, .. } => {
                for x in &values[p * d..(p + 1) * d] {
                    let _ = write!(out, " {x}");
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Exact coordinates of a realization, per vertex.
pub fn exact_coordinates(r: &Realization) -> Option<Vec<Vec<BigRational>>> {
    r.assignment
        .iter()
        .map(|&p| r.points.exact_point(p).map(<[BigRational]>::to_vec))
        .collect()
}

/// Ordered `key=value` report. Keys are stable identifiers; values never
/// contain newlines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    entries: Vec<(String, String)>,
}

impl RunReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut report = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| syntax(i + 1, "expected `key=value`"))?;
            report.set(k.trim(), v.trim());
        }
        Ok(report)
    }
}
