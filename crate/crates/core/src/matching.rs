//! Matchings and maximum-matching algorithms.
//!
//! Cut matchings (edges with exactly one end in a set `A`) are bipartite and
//! use augmenting paths. Matchings over supported edges of a split can contain
//! odd cycles, so those go through Edmonds' blossom algorithm.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use crate::graph::Graph;

/// A set of vertex-disjoint pairs, stored normalised (`u < v`) and sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new() -> Self {
        Matching::default()
    }

    /// Normalises and sorts `pairs`. Does not check disjointness.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Matching { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Union of two matchings. The caller guarantees vertex-disjointness.
    pub fn union(&self, other: &Matching) -> Matching {
        Matching::from_pairs(self.pairs.iter().chain(other.pairs.iter()).copied())
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().flat_map(|&(u, v)| [u, v])
    }
}

const NONE: usize = usize::MAX;

/// Maximum matching that only uses edges with exactly one end in `side`.
pub fn max_matching_across_cut(g: &Graph, side: &FixedBitSet) -> Matching {
    let (mate, _) = kuhn_across_cut(g, side);
    Matching::from_pairs(
        (0..g.vertex_count())
            .filter(|&v| side.contains(v) && mate[v] != NONE)
            .map(|v| (v, mate[v])),
    )
}

/// Size-only variant of [`max_matching_across_cut`].
pub fn max_matching_across_cut_size(g: &Graph, side: &FixedBitSet) -> usize {
    kuhn_across_cut(g, side).1
}

fn kuhn_across_cut(g: &Graph, side: &FixedBitSet) -> (Vec<usize>, usize) {
    let n = g.vertex_count();
    let mut mate = vec![NONE; n];
    let mut size = 0;
    // greedy start
    for u in side.ones().filter(|&u| u < n) {
        if let Some(&w) = g
            .neighbors(u)
            .iter()
            .find(|&&w| !side.contains(w) && mate[w] == NONE)
        {
            mate[u] = w;
            mate[w] = u;
            size += 1;
        }
    }
    let mut visited = vec![usize::MAX; n];
    for (stamp, u) in side.ones().filter(|&u| u < n).enumerate() {
        if mate[u] == NONE && augment(g, side, u, stamp, &mut visited, &mut mate) {
            size += 1;
        }
    }
    (mate, size)
}

fn augment(
    g: &Graph,
    side: &FixedBitSet,
    u: usize,
    stamp: usize,
    visited: &mut [usize],
    mate: &mut [usize],
) -> bool {
    for &w in g.neighbors(u) {
        if side.contains(w) || visited[w] == stamp {
            continue;
        }
        visited[w] = stamp;
        if mate[w] == NONE || augment(g, side, mate[w], stamp, visited, mate) {
            mate[w] = u;
            mate[u] = w;
            return true;
        }
    }
    false
}

/// A König vertex cover of the crossing edges with exactly one vertex per
/// edge of the returned maximum matching. A cover of size `|M|` certifies that
/// no augmenting path exists.
pub fn cut_matching_with_cover(g: &Graph, side: &FixedBitSet) -> (Matching, Vec<usize>) {
    let n = g.vertex_count();
    let (mate, _) = kuhn_across_cut(g, side);
    // alternating reachability from free vertices of `side`
    let mut reached = FixedBitSet::with_capacity(n);
    let mut queue: VecDeque<usize> = side
        .ones()
        .filter(|&u| u < n && mate[u] == NONE)
        .collect();
    for &u in &queue {
        reached.insert(u);
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if side.contains(w) || reached.put(w) {
                continue;
            }
            let m = mate[w];
            if m != NONE && !reached.put(m) {
                queue.push_back(m);
            }
        }
    }
    let cover = (0..n)
        .filter(|&v| {
            if side.contains(v) {
                !reached.contains(v) && mate[v] != NONE
            } else {
                reached.contains(v)
            }
        })
        .collect();
    let m = Matching::from_pairs(
        (0..n)
            .filter(|&v| side.contains(v) && mate[v] != NONE)
            .map(|v| (v, mate[v])),
    );
    (m, cover)
}

/// Maximum matching in a general graph given by adjacency lists, via Edmonds'
/// blossom algorithm. Reusable scratch space keeps repeated calls on small
/// graphs cheap.
#[derive(Default)]
pub struct BlossomMatcher {
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    blossom: Vec<bool>,
    lca_mark: Vec<bool>,
    queue: VecDeque<usize>,
}

impl BlossomMatcher {
    pub fn new() -> Self {
        BlossomMatcher::default()
    }

    /// Returns the mate array (`usize::MAX` for unmatched vertices) and the
    /// matching size.
    pub fn solve(&mut self, adj: &[Vec<usize>]) -> (&[usize], usize) {
        let n = adj.len();
        self.mate.clear();
        self.mate.resize(n, NONE);
        self.parent.resize(n, NONE);
        self.base.resize(n, 0);
        self.used.resize(n, false);
        self.blossom.resize(n, false);
        self.lca_mark.resize(n, false);
        let mut size = 0;
        for v in 0..n {
            if self.mate[v] == NONE {
                if let Some(&w) = adj[v].iter().find(|&&w| self.mate[w] == NONE) {
                    self.mate[v] = w;
                    self.mate[w] = v;
                    size += 1;
                }
            }
        }
        for root in 0..n {
            if self.mate[root] != NONE || adj[root].is_empty() {
                continue;
            }
            let mut v = self.find_path(adj, root);
            if v == NONE {
                continue;
            }
            size += 1;
            while v != NONE {
                let pv = self.parent[v];
                let ppv = self.mate[pv];
                self.mate[v] = pv;
                self.mate[pv] = v;
                v = ppv;
            }
        }
        (&self.mate, size)
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.lca_mark.iter_mut().for_each(|m| *m = false);
        loop {
            a = self.base[a];
            self.lca_mark[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.lca_mark[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = self.mate[v];
            self.blossom[self.base[v]] = true;
            self.blossom[self.base[m]] = true;
            self.parent[v] = child;
            child = m;
            v = self.parent[m];
        }
    }

    fn find_path(&mut self, adj: &[Vec<usize>], root: usize) -> usize {
        let n = adj.len();
        for i in 0..n {
            self.used[i] = false;
            self.parent[i] = NONE;
            self.base[i] = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &adj[v] {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        NONE
    }
}

/// Maximum matching of `g` restricted to the edges accepted by `keep`.
pub fn max_matching_filtered(g: &Graph, keep: impl Fn(usize, usize) -> bool) -> Matching {
    let adj: Vec<Vec<usize>> = (0..g.vertex_count())
        .map(|u| g.neighbors(u).iter().copied().filter(|&v| keep(u, v)).collect())
        .collect();
    let mut matcher = BlossomMatcher::new();
    let (mate, _) = matcher.solve(&adj);
    Matching::from_pairs(
        mate.iter()
            .enumerate()
            .filter(|&(u, &v)| v != NONE && u < v)
            .map(|(u, &v)| (u, v)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        items.iter().for_each(|&i| s.insert(i));
        s
    }

    #[test]
    fn cut_examples() {
        let p3 = Graph::path(3);
        assert_eq!(max_matching_across_cut(&p3, &set(3, &[0])).len(), 1);
        let p4 = Graph::path(4);
        let m = max_matching_across_cut(&p4, &set(4, &[0, 2]));
        assert_eq!(m.pairs(), &[(0, 1), (2, 3)]);
        assert!(max_matching_across_cut(&p4, &set(4, &[])).is_empty());
    }

    #[test]
    fn odd_cycle_needs_blossoms() {
        // two triangles joined by an edge, plus pendant vertices
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (5, 6), (0, 7)])
            .unwrap();
        assert_eq!(max_matching_filtered(&g, |_, _| true).len(), 4);
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(max_matching_filtered(&c5, |_, _| true).len(), 2);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..10).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(n * 3)).prop_map(move |es| {
                Graph::from_edges(n, es.into_iter().filter(|(a, b)| a != b)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn blossom_matches_brute_force(g in arb_graph()) {
            let m = max_matching_filtered(&g, |_, _| true);
            prop_assert!(oracle::is_matching(&g, m.pairs()));
            prop_assert_eq!(m.len(), oracle::max_matching_size(&g, |_, _| true));
        }

        #[test]
        fn cut_matching_is_maximum_with_cover(g in arb_graph(), bits in any::<u16>()) {
            let n = g.vertex_count();
            let side: FixedBitSet = {
                let mut s = FixedBitSet::with_capacity(n);
                (0..n).filter(|&i| bits >> i & 1 == 1).for_each(|i| s.insert(i));
                s
            };
            let (m, cover) = cut_matching_with_cover(&g, &side);
            prop_assert_eq!(m.len(), cover.len());
            for (u, v) in g.edges() {
                if side.contains(u) != side.contains(v) {
                    prop_assert!(cover.contains(&u) || cover.contains(&v));
                    }
            }
            for &(u, v) in m.pairs() {
                prop_assert!(side.contains(u) != side.contains(v));
            }
            prop_assert!(oracle::is_matching(&g, m.pairs()));
            let brute = oracle::max_matching_size(&g, |a, b| side.contains(a) != side.contains(b));
            prop_assert_eq!(m.len(), brute);
            prop_assert_eq!(max_matching_across_cut_size(&g, &side), brute);
        }
    }
}
