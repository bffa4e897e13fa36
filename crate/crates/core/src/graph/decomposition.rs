use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use super::{parse_usizes, Graph, ProductGraph};
use crate::error::{Error, Result};

/// A tree decomposition: bags of graph vertices connected by a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub vertex_count: usize,
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("decomposition declares {declared} vertices, graph has {actual}")]
    VertexCountMismatch { declared: usize, actual: usize },
    #[error("bag {bag} contains out-of-range vertex {vertex}")]
    VertexOutOfRange { bag: usize, vertex: usize },
    #[error("tree edge {0:?} is invalid")]
    BadTreeEdge((usize, usize)),
    #[error("bags and tree edges do not form a tree")]
    NotATree,
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(usize),
    #[error("edge {0:?} is in no bag")]
    UncoveredEdge((usize, usize)),
    #[error("bags containing vertex {0} are not connected")]
    DisconnectedOccurrences(usize),
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the three tree-decomposition conditions against `graph`.
    pub fn verify(&self, graph: &Graph) -> Result<(), DecompositionError> {
        let n = graph.vertex_count();
        if self.vertex_count != n {
            return Err(DecompositionError::VertexCountMismatch {
                declared: self.vertex_count,
                actual: n,
            });
        }
        let nb = self.bags.len();
        let mut member = vec![FixedBitSet::with_capacity(n); nb];
        for (b, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Err(DecompositionError::VertexOutOfRange { bag: b, vertex: v });
                }
                member[b].insert(v);
            }
        }
        let mut tree_adj = vec![Vec::new(); nb];
        for &(a, b) in &self.edges {
            if a >= nb || b >= nb || a == b {
                return Err(DecompositionError::BadTreeEdge((a, b)));
            }
            tree_adj[a].push(b);
            tree_adj[b].push(a);
        }
        if nb == 0 {
            if n > 0 {
                return Err(DecompositionError::UncoveredVertex(0));
            }
            return Ok(());
        }
        if self.edges.len() != nb - 1 || reach(&tree_adj, 0, |_| true).count_ones(..) != nb {
            return Err(DecompositionError::NotATree);
        }
        for v in 0..n {
            let holders: Vec<usize> = (0..nb).filter(|&b| member[b].contains(v)).collect();
            let Some(&start) = holders.first() else {
                return Err(DecompositionError::UncoveredVertex(v));
            };
            let seen = reach(&tree_adj, start, |b| member[b].contains(v));
            if seen.count_ones(..) != holders.len() {
                return Err(DecompositionError::DisconnectedOccurrences(v));
            }
        }
        for (u, v) in graph.edges() {
            if !member.iter().any(|m| m.contains(u) && m.contains(v)) {
                return Err(DecompositionError::UncoveredEdge((u, v)));
            }
        }
        Ok(())
    }

    /// PACE `.td` text: `s td <#bags> <width+1> <n>`, then `b <i> <v...>`
    /// lines and tree edges, all 1-based.
    pub fn to_td(&self) -> String {
        let mut out = format!(
            "s td {} {} {}\n",
            self.bags.len(),
            self.width() + 1,
            self.vertex_count
        );
        for (i, bag) in self.bags.iter().enumerate() {
            out.push_str(&format!("b {}", i + 1));
            for v in bag {
                out.push_str(&format!(" {}", v + 1));
            }
            out.push('\n');
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        out
    }

    pub fn parse_td(text: &str) -> Result<Self> {
        let mut header = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("s td") {
                let nums = parse_usizes(ln, rest)?;
                let [nb, _, n] = nums[..] else {
                    return Err(Error::parse(ln, "solution line must be `s td <bags> <width+1> <n>`"));
                };
                bags = vec![None; nb];
                header = Some((nb, nums[1], n));
                continue;
            }
            let Some((nb, _, _)) = header else {
                return Err(Error::parse(ln, "content before `s td` line"));
            };
            if let Some(rest) = line.strip_prefix('b') {
                let nums = parse_usizes(ln, rest)?;
                let (&id, vs) = nums
                    .split_first()
                    .ok_or_else(|| Error::parse(ln, "bag line needs an id"))?;
                if id == 0 || id > nb {
                    return Err(Error::parse(ln, format!("bag id {id} out of range")));
                }
                if vs.contains(&0) {
                    return Err(Error::parse(ln, "vertices are 1-based"));
                }
                bags[id - 1] = Some(vs.iter().map(|v| v - 1).collect());
            } else {
                let nums = parse_usizes(ln, line)?;
                let [a, b] = nums[..] else {
                    return Err(Error::parse(ln, "tree edge must be `i j`"));
                };
                if a == 0 || b == 0 {
                    return Err(Error::parse(ln, "bag ids are 1-based"));
                }
                edges.push((a - 1, b - 1));
            }
        }
        let (_, declared_size, vertex_count) =
            header.ok_or_else(|| Error::parse(1, "missing `s td` line"))?;
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::parse(1, format!("bag {} missing", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        let td = TreeDecomposition {
            vertex_count,
            bags,
            edges,
        };
        if !td.bags.is_empty() && td.width() + 1 != declared_size {
            return Err(Error::parse(1, "declared bag size does not match the bags"));
        }
        Ok(td)
    }
}

fn reach(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(adj.len());
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        for &c in &adj[b] {
            if allowed(c) && !seen.put(c) {
                queue.push_back(c);
            }
        }
    }
    seen
}

/// The decomposition that follows the tree: the root bag is the root copy of
/// `H`, every other bag is its own copy plus its parent's copy.
pub fn gk_tree_decomposition(pg: &ProductGraph) -> Result<TreeDecomposition> {
    let tree = pg.tree();
    let bags = (0..tree.len())
        .map(|node| {
            let mut bag: Vec<usize> = pg.copy(node).collect();
            if let Some(parent) = tree.parent(node) {
                bag.extend(pg.copy(parent));
            }
            bag.sort_unstable();
            bag
        })
        .collect();
    let td = TreeDecomposition {
        vertex_count: pg.vertex_count(),
        bags,
        edges: tree.edges().collect(),
    };
    td.verify(pg.graph())
        .map_err(|e| Error::invalid(format!("invalid product structure: {e}")))?;
    Ok(td)
}
