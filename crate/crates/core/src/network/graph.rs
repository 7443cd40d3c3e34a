use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Resampling budget of [`erdos_renyi`].
pub const ER_MAX_ATTEMPTS: u64 = 1000;

/// Connected undirected simple graph on agents `0..d`.
///
/// Edges are stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    d: usize,
    edges: BTreeSet<(usize, usize)>,
}

fn is_connected(d: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let mut g = UnGraph::<(), ()>::with_capacity(d, edges.len());
    let nodes: Vec<_> = (0..d).map(|_| g.add_node(())).collect();
    for &(i, j) in edges {
        g.add_edge(nodes[i], nodes[j], ());
    }
    connected_components(&g) == 1
}

impl Graph {
    pub fn new(d: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let set = Self::collect_edges(d, edges)?;
        if !is_connected(d, &set) {
            return Err(Error::Disconnected(format!(
                "{d} agents, {} edges do not form a single component",
                set.len()
            )));
        }
        Ok(Self { d, edges: set })
    }

    fn collect_edges(d: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<BTreeSet<(usize, usize)>> {
        if d == 0 {
            return Err(Error::InvalidParameter {
                name: "d",
                detail: "a graph needs at least one agent".into(),
            });
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            let bad = |detail: String| Error::InvalidParameter { name: "edges", detail };
            if a == b {
                return Err(bad(format!("self-loop at {a}")));
            }
            if a >= d || b >= d {
                return Err(bad(format!("edge ({a}, {b}) out of range for {d} agents")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(bad(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(set)
    }

    pub fn complete(d: usize) -> Result<Self> {
        Self::new(d, (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))))
    }

    /// Cycle `0 − 1 − … − (d−1) − 0`; for `d = 2` this is a single edge.
    pub fn ring(d: usize) -> Result<Self> {
        match d {
            0 | 1 => Self::new(d, []),
            2 => Self::new(2, [(0, 1)]),
            _ => Self::new(d, (0..d).map(|i| (i, (i + 1) % d))),
        }
    }

    pub fn path(d: usize) -> Result<Self> {
        Self::new(d, (1..d).map(|i| (i - 1, i)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.d];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.d, &self.edges)
    }
}

/// Erdős–Rényi `G(d, prob)` conditioned on connectivity.
///
/// Pairs `i < j` are visited in lexicographic order and kept with
/// probability `prob`. A disconnected draw is discarded and redrawn from
/// `seed + 1`, `seed + 2`, … up to [`ER_MAX_ATTEMPTS`] draws.
pub fn erdos_renyi(d: usize, prob: f64, seed: u64) -> Result<Graph> {
    if d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            detail: "a graph needs at least one agent".into(),
        });
    }
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "prob",
            detail: format!("must lie in (0, 1], got {prob}"),
        });
    }
    for attempt in 0..ER_MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut edges = BTreeSet::new();
        for i in 0..d {
            for j in (i + 1)..d {
                if rng.random::<f64>() < prob {
                    edges.insert((i, j));
                }
            }
        }
        if is_connected(d, &edges) {
            return Ok(Graph { d, edges });
        }
    }
    Err(Error::Disconnected(format!(
        "no connected Erdős–Rényi draw in {ER_MAX_ATTEMPTS} attempts with d = {d}; prob = {prob} is too small"
    )))
}

/// One `i j` pair per line, 0-based.
pub fn write_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, j) in graph.edges() {
        writeln!(out, "{i} {j}").expect("writing to a String");
    }
    std::fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an edge list written by [`write_edge_list`]. Blank lines and lines
/// starting with `#` are skipped.
pub fn read_edge_list(path: impl AsRef<Path>, d: usize) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |col: usize| -> Result<usize> {
            fields
                .get(col)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    row: lineno + 1,
                    col: col + 1,
                    detail: format!("expected two vertex indices, got {line:?}"),
                })
        };
        if fields.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: lineno + 1,
                col: fields.len().min(2) + 1,
                detail: format!("expected two vertex indices, got {line:?}"),
            });
        }
        edges.push((parse(0)?, parse(1)?));
    }
    Graph::new(d, edges)
}
