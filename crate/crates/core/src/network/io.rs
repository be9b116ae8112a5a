//! Text formats for weighted networks.
//!
//! * Edge list: one `i j w` triple per line (0-based, whitespace separated),
//!   `#` starts a comment, unlisted pairs have weight 0. A comment of the form
//!   `# vertices: N` fixes the vertex count; otherwise it is one more than the
//!   largest index seen. `save` always writes that comment so trailing
//!   isolated vertices survive a round trip.
//! * Dense: first line `n`, then `n` lines of `n` reals.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::WeightedNetwork;
use crate::error::{invalid, parse_err, Error, Result};
use crate::scalar::Scalar;

const VERTICES_DIRECTIVE: &str = "vertices:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NetworkFormat {
    #[default]
    EdgeList,
    Dense,
}

impl FromStr for NetworkFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "edge-list" | "edges" => Ok(Self::EdgeList),
            "dense" | "matrix" => Ok(Self::Dense),
            other => Err(invalid(format!(
                "unknown network format `{other}` (expected `edgelist` or `dense`)"
            ))),
        }
    }
}

pub fn load_network<T: Scalar>(path: &Path, format: NetworkFormat) -> Result<WeightedNetwork<T>> {
    let text = fs::read_to_string(path)?;
    parse_network(&text, format)
}

pub fn save_network<T: Scalar>(
    net: &WeightedNetwork<T>,
    path: &Path,
    format: NetworkFormat,
) -> Result<()> {
    fs::write(path, write_network(net, format))?;
    Ok(())
}

pub fn parse_network<T: Scalar>(text: &str, format: NetworkFormat) -> Result<WeightedNetwork<T>> {
    match format {
        NetworkFormat::EdgeList => parse_edge_list(text),
        NetworkFormat::Dense => parse_dense(text),
    }
}

/// Canonical serialization: values use the shortest decimal form that
/// parses back to the same scalar.
pub fn write_network<T: Scalar>(net: &WeightedNetwork<T>, format: NetworkFormat) -> String {
    let n = net.n();
    let mut out = String::new();
    match format {
        NetworkFormat::EdgeList => {
            let _ = writeln!(out, "# {VERTICES_DIRECTIVE} {n}");
            for i in 0..n {
                for j in i + 1..n {
                    let w = net.weight(i, j);
                    if w > T::zero() {
                        let _ = writeln!(out, "{i} {j} {w}");
                    }
                }
            }
        }
        NetworkFormat::Dense => {
            let _ = writeln!(out, "{n}");
            for i in 0..n {
                let row: Vec<String> = net.row(i).iter().map(|w| w.to_string()).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}

fn parse_value<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a vertex index")))
}

fn parse_edge_list<T: Scalar>(text: &str) -> Result<WeightedNetwork<T>> {
    let mut declared: Option<usize> = None;
    let mut entries: Vec<(usize, usize, T, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(rest) = comment.trim().strip_prefix(VERTICES_DIRECTIVE) {
                declared = Some(parse_index(rest.trim(), lineno)?);
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected `i j w`, found {} fields", toks.len()),
            ));
        }
        let i = parse_index(toks[0], lineno)?;
        let j = parse_index(toks[1], lineno)?;
        let w: T = parse_value(toks[2], lineno)?;
        if i == j {
            return Err(Error::Validation(format!(
                "line {lineno}: self-loop at vertex {i}"
            )));
        }
        if !w.is_finite() || w < T::zero() {
            return Err(Error::Validation(format!(
                "line {lineno}: weight {w} is not a finite non-negative number"
            )));
        }
        entries.push((i, j, w, lineno));
    }

    let max_index = entries.iter().map(|e| e.0.max(e.1)).max();
    let n = match (declared, max_index) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::Validation(format!(
                "vertex index {m} exceeds declared vertex count {n}"
            )))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(parse_err(1, "edge list contains no edges and no vertex count")),
    };

    let mut net = WeightedNetwork::empty(n)?;
    let mut seen = vec![false; n * n];
    for (i, j, w, lineno) in entries {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if seen[a * n + b] && net.weight(a, b) != w {
            return Err(Error::Validation(format!(
                "line {lineno}: asymmetric or conflicting weight for pair ({a}, {b}): {} vs {w}",
                net.weight(a, b)
            )));
        }
        seen[a * n + b] = true;
        net.set_weight(a, b, w)?;
    }
    Ok(net)
}

fn parse_dense<T: Scalar>(text: &str) -> Result<WeightedNetwork<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first_line, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let n = parse_index(header, first_line)?;
    if n == 0 {
        return Err(parse_err(first_line, "vertex count must be at least 1"));
    }
    let mut weights = Vec::with_capacity(n * n);
    for row in 0..n {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| parse_err(first_line + row + 1, format!("missing matrix row {row}")))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n {
            return Err(parse_err(
                lineno,
                format!("row {row} has {} entries, expected {n}", toks.len()),
            ));
        }
        for tok in toks {
            weights.push(parse_value::<T>(tok, lineno)?);
        }
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(parse_err(lineno, "trailing data after the matrix"));
    }
    WeightedNetwork::from_dense(n, weights)
}
