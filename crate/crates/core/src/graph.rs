//! Conflict networks, color assignments and their text formats.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Undirected simple graph on vertices `0..n`.
///
/// Neighbor lists are sorted and symmetric. The graph is immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Edgeless graph. `n = 0` is allowed here: reduced networks shrink to it.
    pub fn empty(n: usize) -> Self {
        Self { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            check_edge(u, v, n)?;
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { adjacency, edge_count: seen.len() })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star is simple")
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph induced by `keep`, relabelled so that `keep[i]` becomes `i`.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut relabel = vec![usize::MAX; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let adjacency: Vec<Vec<usize>> = keep
            .iter()
            .map(|&old| {
                let mut list: Vec<usize> = self.adjacency[old]
                    .iter()
                    .filter_map(|&w| (relabel[w] != usize::MAX).then_some(relabel[w]))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Self { adjacency, edge_count }
    }

    pub fn write_to<W: Write>(&self, mut w: W, header: &[String]) -> Result<()> {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "n {}", self.n());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (n, fields.as_slice()) {
                (None, ["n", count]) => {
                    n = Some(parse_usize(count, line_no)?);
                }
                (None, _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected header `n <count>`".into(),
                    })
                }
                (Some(n), [a, b]) => {
                    let (u, v) = (parse_usize(a, line_no)?, parse_usize(b, line_no)?);
                    check_edge(u, v, n).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
                    edges.push((u, v));
                }
                (Some(_), _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected `<u> <v>`, found `{line}`"),
                    })
                }
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, message: "missing header `n <count>`".into() })?;
        Self::from_edges(n, edges)
    }
}

fn check_edge(u: usize, v: usize, n: usize) -> Result<()> {
    if u == v {
        return Err(Error::SelfLoop { vertex: u });
    }
    if let Some(&bad) = [u, v].iter().find(|&&x| x >= n) {
        return Err(Error::VertexOutOfRange { vertex: bad, n });
    }
    Ok(())
}

pub(crate) fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("`{s}` is not a non-negative integer") })
}

/// Erdős–Rényi G(n, p).
///
/// Pairs are visited in `(u, v)` order with `u < v`, one `f64` coin each from
/// a ChaCha8 stream seeded with `seed`; the pair is an edge iff the coin is
/// below `p`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidSize("graph must have at least one vertex".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

pub fn max_degree(g: &Graph) -> usize {
    g.max_degree()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::read_from(std::fs::File::open(path)?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    g.write_to(std::fs::File::create(path)?, &[])
}

/// Color assignment `L` over a palette `0..q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<usize>,
    q: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, q: usize) -> Result<Self> {
        if let Some((vertex, &color)) = colors.iter().enumerate().find(|(_, &c)| c >= q) {
            return Err(Error::ColorOutOfRange { vertex, color, q });
        }
        Ok(Self { colors, q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    /// Caller guarantees `color < q`.
    pub(crate) fn set(&mut self, v: usize, color: usize) {
        debug_assert!(color < self.q);
        self.colors[v] = color;
    }

    pub fn check_len(&self, g: &Graph) -> Result<()> {
        if self.len() != g.n() {
            return Err(Error::LengthMismatch { expected: g.n(), found: self.len() });
        }
        Ok(())
    }

    /// Restrict to the vertices in `keep`, relabelled in order.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self { colors: keep.iter().map(|&v| self.colors[v]).collect(), q: self.q }
    }

    pub fn write_to<W: Write>(&self, mut w: W, header: &[String]) -> Result<()> {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "q {}", self.q);
        for c in &self.colors {
            let _ = writeln!(out, "{c}");
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut q = None;
        let mut colors = Vec::new();
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match (q, line.split_whitespace().collect::<Vec<_>>().as_slice()) {
                (None, ["q", count]) => q = Some(parse_usize(count, line_no)?),
                (None, _) => {
                    return Err(Error::Parse { line: line_no, message: "expected header `q <count>`".into() })
                }
                (Some(_), [c]) => colors.push(parse_usize(c, line_no)?),
                (Some(_), _) => {
                    return Err(Error::Parse { line: line_no, message: format!("expected one color, found `{line}`") })
                }
            }
        }
        let q = q.ok_or(Error::Parse { line: 0, message: "missing header `q <count>`".into() })?;
        Self::new(colors, q)
    }
}

pub fn load_coloring(path: impl AsRef<Path>) -> Result<Coloring> {
    Coloring::read_from(std::fs::File::open(path)?)
}

/// True iff no edge is monochromatic.
pub fn is_proper(g: &Graph, coloring: &Coloring) -> Result<bool> {
    coloring.check_len(g)?;
    Ok(first_conflict(g, coloring.colors()).is_none())
}

pub(crate) fn first_conflict(g: &Graph, colors: &[usize]) -> Option<(usize, usize)> {
    g.edges().find(|&(u, v)| colors[u] == colors[v])
}

pub fn conflict_edges(g: &Graph, colors: &[usize]) -> usize {
    g.edges().filter(|&(u, v)| colors[u] == colors[v]).count()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const GREEN: usize = 0;
    pub const RED: usize = 1;
    pub const BLUE: usize = 2;
    pub const YELLOW: usize = 3;

    /// The six-vertex network-reduction example, shifted to 0-based ids.
    pub fn reduction_example() -> (Graph, Coloring) {
        let edges = [(2, 4), (2, 6), (1, 3), (1, 5), (3, 5), (1, 6)].map(|(u, v)| (u - 1, v - 1));
        let g = Graph::from_edges(6, edges).unwrap();
        let colors = vec![RED, RED, BLUE, BLUE, GREEN, YELLOW];
        (g, Coloring::new(colors, 4).unwrap())
    }
}
