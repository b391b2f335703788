//! Plain-text graph and coloring files shared with external attackers.
//!
//! Graph: first line `n m k`, then `m` lines `u v` with `u < v` in
//! lexicographic order. Coloring: one color per line, line `i` for vertex `i`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Coloring, Graph};

pub fn write_graph(g: &Graph, k: usize) -> String {
    let mut out = format!("{} {} {}\n", g.n(), g.m(), k);
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn parse_line<const N: usize>(line: &str, lineno: usize) -> Result<[usize; N]> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != N {
        return Err(Error::malformed(lineno, format!("expected {N} fields, found {}", fields.len())));
    }
    let mut out = [0usize; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f
            .parse()
            .map_err(|_| Error::malformed(lineno, format!("not an integer: {f:?}")))?;
    }
    Ok(out)
}

/// Parse a graph file; returns the graph and the header's `k`. Positions in
/// errors are 1-based line numbers.
pub fn read_graph(text: &str) -> Result<(Graph, usize)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::malformed(1, "empty graph file"))?;
    let [n, m, k] = parse_line::<3>(header, 1)?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let [u, v] = parse_line::<2>(line, i + 1)?;
        if u >= v || v >= n {
            return Err(Error::malformed(i + 1, format!("edge ({u}, {v}) must satisfy u < v < n")));
        }
        if edges.last().is_some_and(|&last| last >= (u, v)) {
            return Err(Error::malformed(i + 1, "edges not strictly increasing"));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::malformed(1, format!("header declares {m} edges, found {}", edges.len())));
    }
    Ok((Graph::new(n, edges)?, k))
}

pub fn write_coloring(c: &Coloring) -> String {
    c.colors().iter().map(|x| format!("{x}\n")).collect()
}

pub fn read_coloring(text: &str) -> Result<Coloring> {
    let colors = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::malformed(i + 1, format!("not a color: {l:?}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(Coloring::from_colors(colors))
}
