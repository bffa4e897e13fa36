use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::{Graph, TernaryTree};
use crate::error::{Error, Result};

/// The graph `T(H)`: one copy of the pattern `H` per tree node, plus an edge
/// between the `i`-th vertices of adjacent copies.
///
/// Product vertex `(node, i)` has the dense id `node * |V(H)| + i`.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    tree: TernaryTree,
    pattern: Graph,
    graph: Graph,
}

pub fn build_product_graph(tree: TernaryTree, pattern: Graph) -> Result<ProductGraph> {
    let p = pattern.vertex_count();
    if p == 0 {
        return Err(Error::invalid("pattern graph H must be non-empty"));
    }
    let mut graph = Graph::new(tree.len() * p);
    for node in 0..tree.len() {
        for (i, j) in pattern.edges() {
            graph.add_edge(node * p + i, node * p + j)?;
        }
    }
    for (a, b) in tree.edges() {
        for i in 0..p {
            graph.add_edge(a * p + i, b * p + i)?;
        }
    }
    Ok(ProductGraph {
        tree,
        pattern,
        graph,
    })
}

impl ProductGraph {
    pub fn tree(&self) -> &TernaryTree {
        &self.tree
    }

    pub fn pattern(&self) -> &Graph {
        &self.pattern
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern.vertex_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn vertex(&self, node: usize, index: usize) -> usize {
        node * self.pattern_len() + index
    }

    pub fn node_of(&self, v: usize) -> usize {
        v / self.pattern_len()
    }

    pub fn index_of(&self, v: usize) -> usize {
        v % self.pattern_len()
    }

    /// Vertex ids of the copy `H^node`.
    pub fn copy(&self, node: usize) -> std::ops::Range<usize> {
        let p = self.pattern_len();
        node * p..(node + 1) * p
    }
}

/// `OC(T, V)` together with the occupied nodes whose whole copy lies in `V`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Occupancy {
    pub occupied: BTreeSet<usize>,
    pub complete: BTreeSet<usize>,
}

pub fn occupied_set(pg: &ProductGraph, v: &FixedBitSet) -> Occupancy {
    let mut occ = Occupancy::default();
    for node in 0..pg.tree().len() {
        let hits = pg.copy(node).filter(|&x| v.contains(x)).count();
        if hits > 0 {
            occ.occupied.insert(node);
            if hits == pg.pattern_len() {
                occ.complete.insert(node);
            }
        }
    }
    occ
}

/// Role of a product vertex with respect to a split `V = V1 ∪ V2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    First,
    Second,
    Outside,
}

/// A subset `V` of product vertices split into disjoint `V1` and `V2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RolePartition {
    roles: Vec<Role>,
}

impl RolePartition {
    pub fn new(vertex_count: usize, first: &FixedBitSet, second: &FixedBitSet) -> Result<Self> {
        let mut roles = vec![Role::Outside; vertex_count];
        for v in first.ones() {
            if v >= vertex_count {
                return Err(Error::invalid(format!("vertex {v} out of range")));
            }
            roles[v] = Role::First;
        }
        for v in second.ones() {
            if v >= vertex_count {
                return Err(Error::invalid(format!("vertex {v} out of range")));
            }
            if roles[v] == Role::First {
                return Err(Error::invalid(format!("vertex {v} is in both V1 and V2")));
            }
            roles[v] = Role::Second;
        }
        Ok(RolePartition { roles })
    }

    pub fn from_roles(roles: Vec<Role>) -> Self {
        RolePartition { roles }
    }

    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }
}

/// Tree nodes whose entire copy of `H` carries a single role.
pub fn homogeneous_nodes(pg: &ProductGraph, roles: &RolePartition) -> BTreeSet<usize> {
    (0..pg.tree().len())
        .filter(|&node| {
            let mut copy = pg.copy(node);
            let first = roles.role(copy.next().expect("copies are non-empty"));
            copy.all(|v| roles.role(v) == first)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &i in items {
            s.insert(i);
        }
        s
    }

    #[test]
    fn single_edge_over_height_one() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(2)).unwrap();
        assert_eq!(pg.vertex_count(), 8);
        assert_eq!(pg.graph().edge_count(), 10);
        assert_eq!(pg.graph().max_degree(), 4);
    }

    #[test]
    fn height_zero_is_the_pattern() {
        let h = Graph::path(3);
        let pg = build_product_graph(TernaryTree::new(0), h.clone()).unwrap();
        assert_eq!(pg.graph(), &h);
    }

    #[test]
    fn empty_pattern_rejected() {
        assert!(build_product_graph(TernaryTree::new(1), Graph::new(0)).is_err());
    }

    #[test]
    fn closed_form_counts() {
        for h in 0..4 {
            for pattern in [Graph::path(1), Graph::path(3), Graph::complete(4), Graph::star(3)] {
                let t = TernaryTree::new(h);
                let (tn, te) = (t.len(), t.len() - 1);
                let pg = build_product_graph(t, pattern.clone()).unwrap();
                assert_eq!(pg.vertex_count(), tn * pattern.vertex_count());
                assert_eq!(
                    pg.graph().edge_count(),
                    tn * pattern.edge_count() + te * pattern.vertex_count()
                );
                let tree_deg = if h == 0 { 0 } else if h == 1 { 3 } else { 4 };
                assert_eq!(pg.graph().max_degree(), pattern.max_degree() + tree_deg);
            }
        }
    }

    #[test]
    fn product_edges_match_definition() {
        let pg = build_product_graph(TernaryTree::new(2), Graph::path(3)).unwrap();
        let t = pg.tree().to_graph();
        let h = pg.pattern();
        for a in 0..pg.vertex_count() {
            for b in 0..pg.vertex_count() {
                let (na, ia, nb, ib) = (pg.node_of(a), pg.index_of(a), pg.node_of(b), pg.index_of(b));
                let expected = (na == nb && h.has_edge(ia, ib)) || (ia == ib && t.has_edge(na, nb));
                assert_eq!(pg.graph().has_edge(a, b), expected);
            }
        }
    }

    #[test]
    fn occupancy_examples() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(2)).unwrap();
        let n = pg.vertex_count();
        assert_eq!(occupied_set(&pg, &set(n, &[])), Occupancy::default());
        let all = set(n, &(0..n).collect::<Vec<_>>());
        let occ = occupied_set(&pg, &all);
        assert_eq!(occ.occupied.len(), 4);
        assert_eq!(occ.complete.len(), 4);
        let occ = occupied_set(&pg, &set(n, &[pg.vertex(0, 0)]));
        assert_eq!(occ.occupied, BTreeSet::from([0]));
        assert!(occ.complete.is_empty());
    }

    #[test]
    fn homogeneity_examples() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(2)).unwrap();
        let n = pg.vertex_count();
        let all = set(n, &(0..n).collect::<Vec<_>>());
        let empty = set(n, &[]);
        let r = RolePartition::new(n, &all, &empty).unwrap();
        assert_eq!(homogeneous_nodes(&pg, &r).len(), 4);
        let r = RolePartition::new(n, &empty, &empty).unwrap();
        assert_eq!(homogeneous_nodes(&pg, &r).len(), 4);
        let r = RolePartition::new(n, &set(n, &[0]), &set(n, &[1])).unwrap();
        assert_eq!(homogeneous_nodes(&pg, &r), BTreeSet::from([1, 2, 3]));
        assert!(RolePartition::new(n, &set(n, &[0]), &set(n, &[0])).is_err());
    }
}
