//! Definition-level checkers and brute-force reference computations.
//!
//! Nothing here calls into the matching or width algorithms; the point is to
//! have a second, deliberately naive implementation to compare against.

use std::collections::HashMap;

use crate::graph::{Graph, Role};

/// Every pair is an edge of `g` and no vertex is used twice.
pub fn is_matching(g: &Graph, pairs: &[(usize, usize)]) -> bool {
    let mut used = vec![false; g.vertex_count()];
    for &(a, b) in pairs {
        if a >= used.len() || b >= used.len() || !g.has_edge(a, b) || used[a] || used[b] {
            return false;
        }
        used[a] = true;
        used[b] = true;
    }
    true
}

/// Size of a maximum matching among the edges accepted by `keep`, by
/// exhaustive branching on the lowest unmatched vertex.
pub fn max_matching_size(g: &Graph, keep: impl Fn(usize, usize) -> bool) -> usize {
    let n = g.vertex_count();
    let edges: Vec<Vec<usize>> = (0..n)
        .map(|a| g.neighbors(a).iter().copied().filter(|&b| keep(a, b) && keep(b, a)).collect())
        .collect();
    let mut used = vec![false; n];
    branch(&edges, 0, &mut used)
}

fn branch(edges: &[Vec<usize>], from: usize, used: &mut [bool]) -> usize {
    let Some(a) = (from..edges.len()).find(|&a| !used[a]) else {
        return 0;
    };
    used[a] = true;
    let mut best = branch(edges, a + 1, used);
    for &b in &edges[a] {
        if !used[b] {
            used[b] = true;
            best = best.max(1 + branch(edges, a + 1, used));
            used[b] = false;
        }
    }
    used[a] = false;
    best
}

/// Partial matching width by walking permutations of `V` directly. Cut
/// sizes come from [`max_matching_size`] and are cached per prefix set. A
/// branch stops as soon as its running maximum reaches the best complete
/// permutation seen so far, or when the best equals a lower bound every
/// permutation must meet.
pub fn pmw_by_permutations(g: &Graph, v: &[usize]) -> usize {
    PermutationOracle::new(g).pmw(v)
}

/// [`pmw_by_permutations`] with the cut cache kept across calls on one graph.
pub struct PermutationOracle<'g> {
    g: &'g Graph,
    cache: HashMap<u64, usize>,
}

impl<'g> PermutationOracle<'g> {
    pub fn new(g: &'g Graph) -> Self {
        assert!(g.vertex_count() <= 64);
        PermutationOracle { g, cache: HashMap::new() }
    }

    pub fn pmw(&mut self, v: &[usize]) -> usize {
        if v.is_empty() {
            return 0;
        }
        let g = self.g;
        let cache = &mut self.cache;
        let mut cut = |prefix: u64| -> usize {
            *cache.entry(prefix).or_insert_with(|| {
                max_matching_size(g, |a, b| (prefix >> a & 1) != (prefix >> b & 1))
            })
        };
        // every permutation passes through some prefix of each length j
        let mut floor = 0;
        for j in 1..=v.len() {
            let mut low = usize::MAX;
            for_each_subset_of_size(v, j, &mut |m| low = low.min(cut(m)));
            floor = floor.max(low);
        }
        let mut best = usize::MAX;
        let mut order = Vec::with_capacity(v.len());
        search(v, 0, 0, &mut order, &mut best, floor, &mut cut);
        best
    }
}

fn for_each_subset_of_size(v: &[usize], j: usize, f: &mut dyn FnMut(u64)) {
    fn go(v: &[usize], start: usize, left: usize, acc: u64, f: &mut dyn FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..v.len() {
            go(v, i + 1, left - 1, acc | 1 << v[i], f);
        }
    }
    go(v, 0, j, 0, f);
}

fn search(
    v: &[usize],
    prefix: u64,
    running: usize,
    order: &mut Vec<usize>,
    best: &mut usize,
    floor: usize,
    cut: &mut dyn FnMut(u64) -> usize,
) {
    if *best <= floor || running >= *best {
        return;
    }
    if order.len() == v.len() {
        *best = running;
        return;
    }
    for &x in v {
        if prefix >> x & 1 == 1 {
            continue;
        }
        let next = prefix | 1 << x;
        let value = running.max(cut(next));
        order.push(x);
        search(v, next, value, order, best, floor, cut);
        order.pop();
    }
}

/// Checks the witnessing condition for `pairs` against the split of `sv` at
/// `split`; `in_v` marks membership in `V`.
pub fn check_witnessing(
    g: &Graph,
    in_v: &[bool],
    sv: &[usize],
    split: usize,
    pairs: &[(usize, usize)],
) -> Result<(), String> {
    if !is_matching(g, pairs) {
        return Err("not a matching of the graph".into());
    }
    let listed: Vec<usize> = {
        let mut s = sv.to_vec();
        s.sort_unstable();
        s
    };
    let members: Vec<usize> = (0..in_v.len()).filter(|&x| in_v[x]).collect();
    if listed != members {
        return Err("permutation does not list V exactly once".into());
    }
    if split > sv.len() {
        return Err("split beyond the permutation".into());
    }
    let first = |x: usize| sv[..split].contains(&x);
    for &(a, b) in pairs {
        let ok = match (in_v[a], in_v[b]) {
            (true, true) => first(a) != first(b),
            (true, false) | (false, true) => true,
            (false, false) => false,
        };
        if !ok {
            return Err(format!("edge {{{a}, {b}}} is not supported"));
        }
    }
    Ok(())
}

/// Checks that `pairs` is a matching whose edges join vertices of different
/// roles.
pub fn check_role_matching(g: &Graph, roles: &[Role], pairs: &[(usize, usize)]) -> Result<(), String> {
    if !is_matching(g, pairs) {
        return Err("not a matching of the graph".into());
    }
    match pairs.iter().find(|&&(a, b)| roles[a] == roles[b]) {
        Some((a, b)) => Err(format!("edge {{{a}, {b}}} joins equal roles")),
        None => Ok(()),
    }
}
