use super::Graph;

/// Number of nodes of a complete rooted ternary tree of the given height,
/// `(3^(height+1) - 1) / 2`.
pub fn ternary_node_count(height: u32) -> u64 {
    (3u64.pow(height + 1) - 1) / 2
}

/// Height of the largest complete ternary tree with at most `x` nodes.
///
/// # Panics
///
/// Panics if `x == 0`.
pub fn tr(x: u64) -> u32 {
    assert!(x >= 1, "tr is defined for x >= 1");
    let mut h = 0;
    while ternary_node_count(h + 1) <= x {
        h += 1;
    }
    h
}

/// A complete rooted ternary tree.
///
/// Nodes are numbered breadth-first: the root is `0` and the children of `v`
/// are `3v + 1, 3v + 2, 3v + 3`, in that (fixed) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryTree {
    height: u32,
    len: usize,
    internal: usize,
}

impl TernaryTree {
    pub fn new(height: u32) -> Self {
        let len = ternary_node_count(height) as usize;
        let internal = if height == 0 {
            0
        } else {
            ternary_node_count(height - 1) as usize
        };
        TernaryTree {
            height,
            len,
            internal,
        }
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v > 0).then(|| (v - 1) / 3)
    }

    pub fn children(&self, v: usize) -> Option<[usize; 3]> {
        (v < self.internal).then(|| [3 * v + 1, 3 * v + 2, 3 * v + 3])
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v >= self.internal
    }

    pub fn depth(&self, mut v: usize) -> u32 {
        let mut d = 0;
        while v > 0 {
            v = (v - 1) / 3;
            d += 1;
        }
        d
    }

    /// Height of the subtree rooted at `v`.
    pub fn subtree_height(&self, v: usize) -> u32 {
        self.height - self.depth(v)
    }

    /// Nodes of the subtree rooted at `v`, in breadth-first order.
    ///
    /// With breadth-first numbering each level of a subtree is a contiguous
    /// range, so this is just a concatenation of ranges.
    pub fn subtree_nodes(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut lo, mut width) = (v, 1usize);
        for _ in 0..=self.subtree_height(v) {
            out.extend(lo..lo + width);
            lo = 3 * lo + 1;
            width *= 3;
        }
        out
    }

    /// The unique path from `u` to `v`, both ends included.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut a, mut b) = (u, v);
        let (mut up, mut down) = (vec![], vec![]);
        while a != b {
            if a > b {
                up.push(a);
                a = (a - 1) / 3;
            } else {
                down.push(b);
                b = (b - 1) / 3;
            }
        }
        up.push(a);
        up.extend(down.into_iter().rev());
        up
    }

    /// Tree edges `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.len).map(|v| ((v - 1) / 3, v))
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.len, self.edges()).expect("tree edges are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        assert_eq!(TernaryTree::new(0).len(), 1);
        assert_eq!(TernaryTree::new(1).len(), 4);
        assert_eq!(TernaryTree::new(2).len(), 13);
        assert_eq!(TernaryTree::new(3).len(), 40);
    }

    #[test]
    fn tr_examples() {
        assert_eq!(tr(1), 0);
        assert_eq!(tr(3), 0);
        assert_eq!(tr(4), 1);
        assert_eq!(tr(12), 1);
        assert_eq!(tr(13), 2);
    }

    #[test]
    fn tr_sandwich_up_to_a_million() {
        // |V(T)| <= x <= 3|V(T)| for the tree of height tr(x); the upper bound
        // holds because the next tree has 3|V(T)| + 1 nodes.
        for x in 1..=1_000_000u64 {
            let t = ternary_node_count(tr(x));
            assert!(t <= x && x <= 3 * t, "x = {x}");
        }
    }

    #[test]
    fn structure_invariants() {
        for h in 0..5 {
            let t = TernaryTree::new(h);
            for v in 0..t.len() {
                match t.children(v) {
                    Some(cs) => {
                        for c in cs {
                            assert_eq!(t.parent(c), Some(v));
                        }
                    }
                    None => assert_eq!(t.depth(v), h),
                }
            }
            assert_eq!(t.subtree_nodes(0).len(), t.len());
            assert_eq!(t.edges().count(), t.len() - 1);
        }
    }

    #[test]
    fn subtree_and_path() {
        let t = TernaryTree::new(2);
        assert_eq!(t.subtree_nodes(2), vec![2, 7, 8, 9]);
        assert_eq!(t.path(4, 12), vec![4, 1, 0, 3, 12]);
        assert_eq!(t.path(0, 0), vec![0]);
        assert_eq!(t.path(1, 5), vec![1, 5]);
    }
}
