//! Partial matching width and witnessing matchings, computed exactly.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{max_matching_across_cut_size, max_matching_filtered, BlossomMatcher, Matching};

/// Default bound on `|V|` for exact width computations.
pub const DEFAULT_PERM_CAP: usize = 9;

/// Hard limit for the subset tables, independent of the configurable cap.
const TABLE_LIMIT: usize = 24;

/// A matching supported by the split of a permutation `SV` into the first
/// `split` elements (`SV1`) and the rest (`SV2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessingMatching {
    pub matching: Matching,
    pub split: usize,
}

impl WitnessingMatching {
    pub fn len(&self) -> usize {
        self.matching.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matching.is_empty()
    }
}

/// Checks that `sv` lists every vertex of `v` exactly once.
pub fn check_permutation(n: usize, v: &FixedBitSet, sv: &[usize]) -> Result<()> {
    let mut seen = FixedBitSet::with_capacity(n);
    for &x in sv {
        if x >= n {
            return Err(Error::invalid(format!("permutation entry {x} out of range")));
        }
        if !v.contains(x) {
            return Err(Error::invalid(format!("permutation entry {x} is not in V")));
        }
        if seen.put(x) {
            return Err(Error::invalid(format!("vertex {x} repeated in permutation")));
        }
    }
    if seen.count_ones(..) != v.count_ones(..) {
        return Err(Error::invalid("permutation does not cover V"));
    }
    Ok(())
}

fn members(v: &FixedBitSet, n: usize) -> Result<Vec<usize>> {
    let elems: Vec<usize> = v.ones().collect();
    if let Some(&x) = elems.iter().find(|&&x| x >= n) {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    Ok(elems)
}

fn mask_to_set(elems: &[usize], mask: u32, n: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for (i, &x) in elems.iter().enumerate() {
        if mask >> i & 1 == 1 {
            s.insert(x);
        }
    }
    s
}

/// `best[S] = max(value[S], min over x in S of best[S \ x])`, the min-max over
/// orderings of `S` of the largest value on a prefix.
fn prefix_minmax(value: &[u32]) -> Vec<u32> {
    let mut best = value.to_vec();
    for s in 1..value.len() {
        let mut rest = s;
        let mut low = u32::MAX;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            low = low.min(best[s ^ bit]);
            rest ^= bit;
        }
        best[s] = best[s].max(low);
    }
    best
}

fn argmin_order(best: &[u32], elems: &[usize], full: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(elems.len());
    let mut s = full;
    while s != 0 {
        let (bit, _) = (0..elems.len())
            .filter(|&i| s >> i & 1 == 1)
            .map(|i| (i, best[s ^ (1 << i)]))
            .min_by_key(|&(i, b)| (b, i))
            .expect("non-empty set");
        order.push(elems[bit]);
        s ^= 1 << bit;
    }
    order.reverse();
    order
}

/// Minimum over permutations of `V` of the largest cut matching between a
/// prefix and the rest of the graph.
pub fn pmw_exact(g: &Graph, v: &FixedBitSet) -> Result<usize> {
    pmw_exact_capped(g, v, DEFAULT_PERM_CAP)
}

pub fn pmw_exact_capped(g: &Graph, v: &FixedBitSet, cap: usize) -> Result<usize> {
    Ok(pmw_with_order(g, v, cap)?.0)
}

/// The width together with a permutation attaining it.
pub fn pmw_with_order(g: &Graph, v: &FixedBitSet, cap: usize) -> Result<(usize, Vec<usize>)> {
    let n = g.vertex_count();
    let elems = members(v, n)?;
    let k = elems.len();
    if k > cap || k > TABLE_LIMIT {
        return Err(Error::cap("permutation size |V|", k as u128, cap.min(TABLE_LIMIT) as u128));
    }
    let value: Vec<u32> = (0..1u32 << k)
        .map(|m| max_matching_across_cut_size(g, &mask_to_set(&elems, m, n)) as u32)
        .collect();
    let best = prefix_minmax(&value);
    let full = (1usize << k) - 1;
    Ok((best[full] as usize, argmin_order(&best, &elems, full)))
}

/// Partial matching width of every subset of `V(G)` at once. The cut value of
/// a prefix does not depend on `V`, so one table serves all subsets.
pub struct PmwTable {
    n: usize,
    best: Vec<u32>,
}

impl PmwTable {
    pub fn new(g: &Graph, cap: usize) -> Result<Self> {
        let n = g.vertex_count();
        if n > cap || n > TABLE_LIMIT {
            return Err(Error::cap("graph size for width table", n as u128, cap.min(TABLE_LIMIT) as u128));
        }
        let all: Vec<usize> = (0..n).collect();
        let value: Vec<u32> = (0..1u32 << n)
            .map(|m| max_matching_across_cut_size(g, &mask_to_set(&all, m, n)) as u32)
            .collect();
        Ok(PmwTable {
            n,
            best: prefix_minmax(&value),
        })
    }

    /// Width of the vertex set encoded by `mask` (bit `i` = vertex `i`).
    pub fn width(&self, mask: u32) -> usize {
        self.best[mask as usize] as usize
    }

    /// A permutation of `mask` attaining [`PmwTable::width`].
    pub fn optimal_order(&self, mask: u32) -> Vec<usize> {
        let all: Vec<usize> = (0..self.n).collect();
        argmin_order(&self.best, &all, mask as usize)
    }
}

/// Whether `{a, b}` is supported by the split where `first` holds `SV1`.
pub fn is_supported(v: &FixedBitSet, first: &FixedBitSet, a: usize, b: usize) -> bool {
    match (v.contains(a), v.contains(b)) {
        (true, true) => first.contains(a) != first.contains(b),
        (true, false) | (false, true) => true,
        (false, false) => false,
    }
}

/// The largest witnessing matching for `sv`, over all split positions. Ties
/// go to the smallest split.
pub fn witnessing_matching_exact(g: &Graph, v: &FixedBitSet, sv: &[usize]) -> Result<WitnessingMatching> {
    let n = g.vertex_count();
    check_permutation(n, v, sv)?;
    let mut first = FixedBitSet::with_capacity(n);
    let mut matcher = BlossomMatcher::new();
    let mut adj = Vec::new();
    let (mut best, mut best_t) = (0, 0);
    for t in 0..=sv.len() {
        if t > 0 {
            first.insert(sv[t - 1]);
        }
        let size = supported_size(g, v, &first, &mut matcher, &mut adj);
        if size > best {
            (best, best_t) = (size, t);
        }
    }
    let first: FixedBitSet = sv[..best_t].iter().copied().collect();
    let matching = max_matching_filtered(g, |a, b| is_supported(v, &first, a, b));
    Ok(WitnessingMatching { matching, split: best_t })
}

/// Size of the largest matching supported by `(S, V \ S)`; `adj` is scratch.
fn supported_size(
    g: &Graph,
    v: &FixedBitSet,
    first: &FixedBitSet,
    matcher: &mut BlossomMatcher,
    adj: &mut Vec<Vec<usize>>,
) -> usize {
    adj.resize_with(g.vertex_count(), Vec::new);
    for (a, row) in adj.iter_mut().enumerate() {
        row.clear();
        row.extend(g.neighbors(a).iter().copied().filter(|&b| is_supported(v, first, a, b)));
    }
    matcher.solve(adj).1
}

/// Minimum over all permutations of `V` of the largest witnessing matching.
/// Returns the value and a permutation attaining it.
pub fn min_witnessing_exact(g: &Graph, v: &FixedBitSet, cap: usize) -> Result<(usize, Vec<usize>)> {
    let n = g.vertex_count();
    let elems = members(v, n)?;
    let k = elems.len();
    if k > cap || k > TABLE_LIMIT {
        return Err(Error::cap("permutation size |V|", k as u128, cap.min(TABLE_LIMIT) as u128));
    }
    let mut matcher = BlossomMatcher::new();
    let mut adj = Vec::new();
    let full = (1usize << k) - 1;
    // (S, V \ S) and (V \ S, S) support the same edges
    let mut value = vec![0u32; full + 1];
    for m in 0..=full {
        value[m] = if full ^ m < m {
            value[full ^ m]
        } else {
            supported_size(g, v, &mask_to_set(&elems, m as u32, n), &mut matcher, &mut adj) as u32
        };
    }
    let best = prefix_minmax(&value);
    Ok((best[full] as usize, argmin_order(&best, &elems, full)))
}

/// Turns a witnessing matching into a prefix of `sv` and a cut matching of at
/// least half its size: either the edges crossing the split (prefix `SV1`) or
/// the edges leaving `V` (prefix `SV`), whichever is larger.
///
/// Returns the prefix length and the matching.
pub fn witness_to_prefix(
    w: &WitnessingMatching,
    g: &Graph,
    v: &FixedBitSet,
    sv: &[usize],
) -> Result<(usize, Matching)> {
    let n = g.vertex_count();
    check_permutation(n, v, sv)?;
    if w.split > sv.len() {
        return Err(Error::pre("witness_to_prefix", "split beyond the permutation"));
    }
    let mut first = FixedBitSet::with_capacity(n);
    sv[..w.split].iter().for_each(|&x| first.insert(x));
    let (mut inner, mut outer) = (Vec::new(), Vec::new());
    for &(a, b) in w.matching.pairs() {
        if !g.has_edge(a, b) || !is_supported(v, &first, a, b) {
            return Err(Error::pre(
                "witness_to_prefix",
                format!("edge {{{a}, {b}}} is not supported by the split"),
            ));
        }
        if v.contains(a) && v.contains(b) {
            inner.push((a, b));
        } else {
            outer.push((a, b));
        }
    }
    if inner.len() >= outer.len() {
        Ok((w.split, Matching::from_pairs(inner)))
    } else {
        Ok((sv.len(), Matching::from_pairs(outer)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        items.iter().for_each(|&i| s.insert(i));
        s
    }

    #[test]
    fn pmw_examples() {
        let edge = Graph::path(2);
        assert_eq!(pmw_exact(&edge, &set(2, &[0, 1])).unwrap(), 1);
        assert_eq!(pmw_exact(&edge, &set(2, &[])).unwrap(), 0);
        let star = Graph::star(3);
        assert_eq!(pmw_exact(&star, &set(4, &[1, 2, 3])).unwrap(), 1);
    }

    #[test]
    fn pmw_cap() {
        let g = Graph::path(12);
        let all = set(12, &(0..12).collect::<Vec<_>>());
        assert!(matches!(pmw_exact(&g, &all), Err(Error::CapExceeded { .. })));
        assert!(pmw_exact_capped(&g, &all, 12).is_ok());
    }

    #[test]
    fn table_agrees_with_direct() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 1)]).unwrap();
        let table = PmwTable::new(&g, 9).unwrap();
        for mask in 0u32..64 {
            let v = set(6, &(0..6).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
            let (w, order) = pmw_with_order(&g, &v, 9).unwrap();
            assert_eq!(table.width(mask), w);
            check_permutation(6, &v, &order).unwrap();
            check_permutation(6, &v, &table.optimal_order(mask)).unwrap();
        }
    }

    #[test]
    fn witnessing_examples() {
        let edge = Graph::path(2);
        let w = witnessing_matching_exact(&edge, &set(2, &[0, 1]), &[0, 1]).unwrap();
        assert_eq!((w.len(), w.split), (1, 1));
        let w = witnessing_matching_exact(&edge, &set(2, &[0]), &[0]).unwrap();
        assert_eq!(w.len(), 1);
        let p4 = Graph::path(4);
        let w = witnessing_matching_exact(&p4, &set(4, &[0, 1, 2, 3]), &[0, 2, 1, 3]).unwrap();
        assert_eq!((w.len(), w.split), (2, 2));
        assert!(witnessing_matching_exact(&p4, &set(4, &[0, 1]), &[0]).is_err());
    }

    #[test]
    fn prefix_examples() {
        // two crossing edges
        let g = Graph::path(4);
        let v = set(4, &[0, 1, 2, 3]);
        let w = WitnessingMatching {
            matching: Matching::from_pairs([(0, 1), (2, 3)]),
            split: 2,
        };
        let (len, m) = witness_to_prefix(&w, &g, &v, &[0, 2, 1, 3]).unwrap();
        assert_eq!((len, m.len()), (2, 2));
        // two edges leaving V
        let v = set(4, &[0, 3]);
        let w = WitnessingMatching {
            matching: Matching::from_pairs([(0, 1), (2, 3)]),
            split: 1,
        };
        let (len, m) = witness_to_prefix(&w, &g, &v, &[0, 3]).unwrap();
        assert_eq!((len, m.len()), (2, 2));
        // mixed: one crossing, two leaving
        let g = Graph::path(6);
        let v = set(6, &[1, 2, 4]);
        let w = WitnessingMatching {
            matching: Matching::from_pairs([(0, 1), (2, 3), (4, 5)]),
            split: 1,
        };
        let (len, m) = witness_to_prefix(&w, &g, &v, &[1, 2, 4]).unwrap();
        assert_eq!(len, 3);
        assert!(m.len() >= 2);
        let w = WitnessingMatching {
            matching: Matching::from_pairs([(1, 2), (0, 1)]),
            split: 1,
        };
        assert!(witness_to_prefix(&w, &g, &v, &[1, 2, 4]).is_ok());
        let bad = WitnessingMatching {
            matching: Matching::from_pairs([(1, 2)]),
            split: 0,
        };
        assert!(witness_to_prefix(&bad, &g, &v, &[1, 2, 4]).is_err());
    }

    fn arb_graph_and_set() -> impl Strategy<Value = (Graph, FixedBitSet)> {
        (1usize..8).prop_flat_map(|n| {
            (
                proptest::collection::vec((0..n, 0..n), 0..(n * 2)),
                proptest::collection::vec(any::<bool>(), n),
            )
                .prop_map(move |(es, bits)| {
                    let g = Graph::from_edges(n, es.into_iter().filter(|(a, b)| a != b)).unwrap();
                    let mut v = FixedBitSet::with_capacity(n);
                    bits.iter().enumerate().filter(|(_, &b)| b).for_each(|(i, _)| v.insert(i));
                    (g, v)
                })
        })
    }

    proptest! {
        #[test]
        fn half_of_any_witness_is_a_cut_matching((g, v) in arb_graph_and_set(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut sv: Vec<usize> = v.ones().collect();
            sv.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let w = witnessing_matching_exact(&g, &v, &sv).unwrap();
            let (len, m) = witness_to_prefix(&w, &g, &v, &sv).unwrap();
            prop_assert!(2 * m.len() >= w.len());
            let prefix = set(g.vertex_count(), &sv[..len]);
            for &(a, b) in m.pairs() {
                prop_assert!(g.has_edge(a, b));
                prop_assert!(prefix.contains(a) != prefix.contains(b));
            }
            let (width, _) = pmw_with_order(&g, &v, 9).unwrap();
            let (s, _) = min_witnessing_exact(&g, &v, 9).unwrap();
            prop_assert!(2 * width >= s);
            prop_assert!(width <= s);
        }
    }
}
