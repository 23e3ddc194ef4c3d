//! Undirected simple graphs and the whitespace edge-list format.
//!
//! Edge lists hold one `u v` pair per line. Lines starting with `#` or `%`
//! are comments. Vertex ids may be arbitrary non-negative integers; they are
//! compacted to `0..n` in order of first appearance.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Undirected graph without self-loops or parallel edges.
///
/// Immutable once built. Edges keep their insertion order and orientation so
/// that a loaded graph serializes back to an equivalent edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// Counts of edge-list lines dropped during construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[v]` is the id used in the input for compact vertex `v`.
    pub original_ids: Vec<u64>,
    pub dropped: DropCounts,
}

impl Graph {
    /// Builds a graph on `n` vertices, dropping self-loops and repeated pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_counted(n, edges).map(|(g, _)| g)
    }

    pub(crate) fn from_edges_counted<I>(n: usize, edges: I) -> Result<(Self, DropCounts)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::Config("graph needs at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut dropped = DropCounts::default();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Config(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                dropped.self_loops += 1;
                continue;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                dropped.duplicates += 1;
                continue;
            }
            kept.push((u, v));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &kept {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok((
            Graph {
                n,
                edges: kept,
                adjacency,
            },
            dropped,
        ))
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Average degree `2m/n`.
    pub fn mean_degree(&self) -> f64 {
        2.0 * self.m() as f64 / self.n as f64
    }

    /// Component id per vertex, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |c| c + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        Self::from_edges(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Subgraph induced by `keep`; vertex `keep[i]` becomes vertex `i`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            if v >= self.n {
                return Err(Error::Config(format!("vertex {v} out of range")));
            }
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Self::from_edges(keep.len(), edges)
    }

    /// Vertices with at least one incident edge, ascending.
    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.degree(v) > 0).collect()
    }

    /// Serializes as an edge list using compact vertex ids.
    pub fn to_edge_list(&self) -> String {
        self.to_edge_list_with_ids(|v| v as u64)
    }

    /// Serializes as an edge list, mapping each vertex through `id`.
    pub fn to_edge_list_with_ids(&self, id: impl Fn(usize) -> u64) -> String {
        let mut out = String::with_capacity(self.edges.len() * 10);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", id(u), id(v));
        }
        out
    }
}

/// Parses an edge list, compacting ids in first-appearance order.
pub fn load_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let mut endpoints = [0usize; 2];
        for (slot, tok) in endpoints.iter_mut().zip(&tokens) {
            let raw: u64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid vertex id {tok:?}"),
            })?;
            *slot = *ids.entry(raw).or_insert_with(|| {
                original_ids.push(raw);
                original_ids.len() - 1
            });
        }
        pairs.push((endpoints[0], endpoints[1]));
    }
    if original_ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (graph, dropped) = Graph::from_edges_counted(original_ids.len(), pairs)?;
    if dropped.duplicates + dropped.self_loops > 0 {
        log::warn!(
            "dropped {} duplicate edges and {} self-loops",
            dropped.duplicates,
            dropped.self_loops
        );
    }
    Ok(LoadedGraph {
        graph,
        original_ids,
        dropped,
    })
}
