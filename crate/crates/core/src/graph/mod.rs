//! Simple undirected graphs and the structures built on top of them: complete
//! ternary trees, tree-of-copies products, the `G_k` family and its tree
//! decomposition.

mod catalog;
mod decomposition;
mod gk;
mod product;
mod tree;

pub use catalog::{canonical_code, graphs_up_to_isomorphism};
pub use decomposition::{gk_tree_decomposition, DecompositionError, TreeDecomposition};
pub use gk::{build_gk_instance, build_gk_instance_rounded, gk_pattern_len};
pub use product::{
    build_product_graph, homogeneous_nodes, occupied_set, Occupancy, ProductGraph, Role,
    RolePartition,
};
pub use tree::{tr, ternary_node_count, TernaryTree};

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// An undirected simple graph on vertices `0..n`.
///
/// Adjacency lists are kept sorted; the edge set is symmetric and contains no
/// self-loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(Error::invalid(format!(
                "edge {{{u}, {v}}} out of range for {n} vertices"
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop on vertex {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(i) => {
                self.adj[u].insert(i, v);
                let j = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(j, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.adj.len())
            .filter(|&v| self.adj[v].is_empty())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adj.len();
        if n == 0 {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(n);
        let mut queue = VecDeque::from([0]);
        seen.insert(0);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen.put(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.count_ones(..) == n
    }

    /// Neighbourhoods as bitmasks. Only available for graphs with at most 64
    /// vertices.
    pub fn neighbor_masks(&self) -> Option<Vec<u64>> {
        if self.adj.len() > 64 {
            return None;
        }
        Some(
            self.adj
                .iter()
                .map(|ns| ns.iter().fold(0u64, |m, &w| m | (1 << w)))
                .collect(),
        )
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("clique edges are valid")
    }

    /// Star with centre `0` and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).expect("star edges are valid")
    }

    /// Edge-list text: `n m` header followed by `u v` lines, 0-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list format written by [`Graph::to_edge_list`]. Blank
    /// lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
        let nums = parse_usizes(hl, header)?;
        let [n, m] = nums[..] else {
            return Err(Error::parse(hl, "header must be `n m`"));
        };
        let mut g = Graph::new(n);
        let mut seen = 0;
        for (ln, line) in lines {
            let nums = parse_usizes(ln, line)?;
            let [u, v] = nums[..] else {
                return Err(Error::parse(ln, "edge line must be `u v`"));
            };
            g.add_edge(u, v).map_err(|e| Error::parse(ln, e.to_string()))?;
            seen += 1;
        }
        if seen != m {
            return Err(Error::parse(hl, format!("header declares {m} edges, found {seen}")));
        }
        Ok(g)
    }
}

pub(crate) fn parse_usizes(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("expected a non-negative integer, got `{t}`")))
        })
        .collect()
}
