//! Simple undirected graphs, the edge-list text format, and generators.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Name of the PRNG behind every seeded routine in this crate.
///
/// `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`; its stream is
/// portable across platforms.
pub const RNG_NAME: &str = "chacha8";

/// The generator behind every seeded operation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are strictly ascending, symmetric, and loop-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Build from an edge list. Rejects self-loops and duplicate edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// `(max_degree, mean_degree)`; `(0, 0.0)` for the graph with no vertices.
    pub fn degree_stats(&self) -> (usize, f64) {
        let n = self.n();
        if n == 0 {
            return (0, 0.0);
        }
        let max = self.adjacency.iter().map(Vec::len).max().unwrap_or(0);
        (max, 2.0 * self.edge_count() as f64 / n as f64)
    }

    pub fn max_degree(&self) -> usize {
        self.degree_stats().0
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Subgraph induced by the vertices with `keep[v]`, relabelled densely
    /// in ascending order. Returns the graph and the old id of each new vertex.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = (0..self.n()).filter(|&v| keep[v]).collect();
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let adjacency = old
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| new_id[w])
                    .collect()
            })
            .collect();
        (Graph { adjacency }, old)
    }

    /// Parse the edge-list text format.
    ///
    /// One edge `u v` per line; blank lines and lines starting with `#` are
    /// ignored, except that a first non-blank line of the form `# n <int>`
    /// sets a minimum vertex count. LF and CRLF line endings are accepted.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n = 0usize;
        let mut edges = Vec::new();
        let mut first = true;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if first {
                    let mut toks = comment.split_whitespace();
                    if toks.next() == Some("n") {
                        let value = toks.next().ok_or_else(|| Error::Parse {
                            line: line_no,
                            msg: "missing vertex count after '# n'".into(),
                        })?;
                        n = value.parse().map_err(|_| Error::Parse {
                            line: line_no,
                            msg: format!("bad vertex count '{value}'"),
                        })?;
                        if toks.next().is_some() {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: "trailing tokens after vertex count".into(),
                            });
                        }
                    }
                }
                first = false;
                continue;
            }
            first = false;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 'u v', found {} tokens", toks.len()),
                });
            }
            let mut ends = [0usize; 2];
            for (slot, tok) in ends.iter_mut().zip(&toks) {
                *slot = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("malformed vertex id '{tok}'"),
                })?;
            }
            let (u, v) = (ends[0], ends[1]);
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v));
        }
        Graph::from_edges(n, &edges)
    }

    /// Serialize to the edge-list format, always writing the `# n` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n {}\n", self.n());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Graph families understood by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Cycle { n: usize },
    Complete { n: usize },
    Grid { width: usize, height: usize },
    /// Rooted tree in which every internal vertex has `d` children.
    DaryTree { d: usize, depth: usize },
    /// Erdős–Rényi graph, each pair kept with probability `min(d/n, 1)`.
    Gnp { n: usize, d: f64 },
}

impl GraphKind {
    pub fn is_random(&self) -> bool {
        matches!(self, GraphKind::Gnp { .. })
    }
}

/// Generate a graph. Only `Gnp` consumes the seed.
///
/// `Gnp` walks the pairs `(i, j)`, `i < j`, in lexicographic order and keeps
/// each one when a fresh `f64` drawn from [`RNG_NAME`] is below `min(d/n, 1)`.
pub fn generate(kind: GraphKind, seed: u64) -> Result<Graph> {
    match kind {
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(invalid("cycle needs n >= 3"));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Complete { n } => {
            if n < 1 {
                return Err(invalid("complete graph needs n >= 1"));
            }
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            Graph::from_edges(n, &edges)
        }
        GraphKind::Grid { width, height } => {
            if width < 1 || height < 1 {
                return Err(invalid("grid needs width, height >= 1"));
            }
            let id = |x: usize, y: usize| y * width + x;
            let mut edges = Vec::new();
            for y in 0..height {
                for x in 0..width {
                    if x + 1 < width {
                        edges.push((id(x, y), id(x + 1, y)));
                    }
                    if y + 1 < height {
                        edges.push((id(x, y), id(x, y + 1)));
                    }
                }
            }
            Graph::from_edges(width * height, &edges)
        }
        GraphKind::DaryTree { d, depth } => {
            if d < 1 {
                return Err(invalid("d-ary tree needs d >= 1"));
            }
            let mut edges = Vec::new();
            let mut level = vec![0usize];
            let mut next_id = 1usize;
            for _ in 0..depth {
                let mut next = Vec::with_capacity(level.len() * d);
                for &parent in &level {
                    for _ in 0..d {
                        edges.push((parent, next_id));
                        next.push(next_id);
                        next_id += 1;
                    }
                }
                level = next;
            }
            Graph::from_edges(next_id, &edges)
        }
        GraphKind::Gnp { n, d } => {
            if n < 1 {
                return Err(invalid("gnp needs n >= 1"));
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid("gnp needs finite d > 0"));
            }
            let p = (d / n as f64).min(1.0);
            let mut rng = seeded_rng(seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            Graph::from_edges(n, &edges)
        }
    }
}
