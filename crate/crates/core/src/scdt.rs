//! Solution-counting decision trees with exact rational edge weights.
//!
//! The tree branches on the variables in a fixed order. Each node keeps the
//! assignment `A_u` of its root path as bit masks and `|F^u|`, the number of
//! models consistent with it. Forcing and neighbourhoods refer to the primal
//! graph of the CNF, which for `φ(G)` is `G` itself.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cnf::{count_models_capped, independent_subset, phi_of_graph, Cnf, LiteralSet, Lit, ModelSet, SubsetMode};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest variable count the tree builder accepts.
pub const SCDT_VAR_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct ScdtEdge {
    pub lit: Lit,
    pub child: usize,
    pub weight: BigRational,
}

#[derive(Clone, Debug)]
pub struct ScdtNode {
    /// Branching variable; `None` at leaves.
    pub var: Option<usize>,
    pub parent: Option<usize>,
    /// `|F^u|`.
    pub count: u64,
    /// Variables set true / false by `A_u`.
    pub pos: u64,
    pub neg: u64,
    pub children: Vec<ScdtEdge>,
    /// Range of the node's models in the tree's model order.
    range: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Scdt {
    nodes: Vec<ScdtNode>,
    order: Vec<usize>,
    neighbors: Vec<u64>,
    monotone2: bool,
    /// Models with variable `v` at bit `v`, sorted by the branching order.
    models: Vec<u64>,
}

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::invalid("order must list every variable exactly once"));
        }
    }
    if order.len() != n {
        return Err(Error::invalid("order must list every variable exactly once"));
    }
    Ok(())
}

/// Builds the full tree for `f` branching in `order`.
pub fn build_scdt(f: &Cnf, order: &[usize]) -> Result<Scdt> {
    let n = f.num_vars();
    if n > SCDT_VAR_CAP {
        return Err(Error::cap("variables for a decision tree", n as u128, SCDT_VAR_CAP as u128));
    }
    check_order(n, order)?;
    let models = ModelSet::from_cnf(f, SCDT_VAR_CAP)?;
    if models.is_empty() {
        return Err(Error::pre("build_scdt", "F is unsatisfiable"));
    }
    // sort key: order[0] most significant, so every node owns a contiguous run
    let mut keyed: Vec<(u64, u64)> = models
        .packed()
        .iter()
        .map(|&m| {
            let (mut key, mut packed) = (0u64, 0u64);
            for (j, &v) in order.iter().enumerate() {
                if m >> (n - 1 - v) & 1 == 1 {
                    key |= 1 << (n - 1 - j);
                    packed |= 1 << v;
                }
            }
            (key, packed)
        })
        .collect();
    keyed.sort_unstable();
    let g = f.primal_graph();
    let neighbors = g.neighbor_masks().expect("at most 64 variables");
    let mut t = Scdt {
        nodes: Vec::new(),
        order: order.to_vec(),
        neighbors,
        monotone2: f.is_monotone_2cnf(),
        models: keyed.iter().map(|&(_, m)| m).collect(),
    };
    let keys: Vec<u64> = keyed.iter().map(|&(k, _)| k).collect();
    t.grow(&keys, 0, 0, keys.len(), 0, 0, None);
    Ok(t)
}

impl Scdt {
    #[allow(clippy::too_many_arguments)]
    fn grow(&mut self, keys: &[u64], depth: usize, lo: usize, hi: usize, pos: u64, neg: u64, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        let n = self.order.len();
        self.nodes.push(ScdtNode {
            var: (depth < n).then(|| self.order[depth]),
            parent,
            count: (hi - lo) as u64,
            pos,
            neg,
            children: Vec::new(),
            range: (lo, hi),
        });
        if depth == n {
            return id;
        }
        let x = self.order[depth];
        let bit = 1u64 << (n - 1 - depth);
        let split = lo + keys[lo..hi].partition_point(|&k| k & bit == 0);
        let total = BigInt::from(hi - lo);
        for (positive, a, b) in [(true, split, hi), (false, lo, split)] {
            if a == b {
                continue;
            }
            let (p2, n2) = if positive { (pos | 1 << x, neg) } else { (pos, neg | 1 << x) };
            let child = self.grow(keys, depth + 1, a, b, p2, n2, Some(id));
            self.nodes[id].children.push(ScdtEdge {
                lit: Lit { var: x, positive },
                child,
                weight: BigRational::new(BigInt::from(b - a), total.clone()),
            });
        }
        id
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[ScdtNode] {
        &self.nodes
    }

    pub fn node(&self, u: usize) -> &ScdtNode {
        &self.nodes[u]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn num_vars(&self) -> usize {
        self.order.len()
    }

    /// `|F|`.
    pub fn model_count(&self) -> u64 {
        self.nodes[0].count
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_empty()).count()
    }

    pub fn neighbor_mask(&self, x: usize) -> u64 {
        self.neighbors[x]
    }

    /// Packed models (bit `v` = variable `v` true) below `u`.
    pub fn models_below(&self, u: usize) -> &[u64] {
        let (lo, hi) = self.nodes[u].range;
        &self.models[lo..hi]
    }

    /// Variables forced to true by `A_u`: neighbours of negatively assigned
    /// variables.
    pub fn forced_mask(&self, u: usize) -> u64 {
        let neg = self.nodes[u].neg;
        (0..self.num_vars())
            .filter(|&v| neg >> v & 1 == 1)
            .fold(0, |m, v| m | self.neighbors[v])
    }

    pub fn is_forced(&self, u: usize, y: usize) -> bool {
        self.neighbors[y] & self.nodes[u].neg != 0
    }

    /// `N^u(x)`: neighbours of `x` neither assigned nor forced by `A_u`.
    pub fn free_neighbors(&self, u: usize, x: usize) -> u64 {
        let node = &self.nodes[u];
        self.neighbors[x] & !(node.pos | node.neg) & !self.forced_mask(u)
    }

    pub fn edge_to(&self, u: usize, v: usize) -> Option<&ScdtEdge> {
        self.nodes[u].children.iter().find(|e| e.child == v)
    }

    /// One line per edge: `parent child literal num/den`, literals 1-based.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for (u, node) in self.nodes.iter().enumerate() {
            for e in &node.children {
                out.push_str(&format!("{u} {} {} {}\n", e.child, e.lit, e.weight));
            }
        }
        out
    }
}

/// Product of edge weights along `path`, a list of nodes each the child of the
/// previous one.
pub fn path_weight(t: &Scdt, path: &[usize]) -> Result<BigRational> {
    let mut w = BigRational::one();
    for pair in path.windows(2) {
        let e = t
            .edge_to(pair[0], pair[1])
            .ok_or_else(|| Error::invalid(format!("{} -> {} is not a tree edge", pair[0], pair[1])))?;
        w *= &e.weight;
    }
    Ok(w)
}

/// Outcome of the exactness sweep over all root-leaf paths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrectCountReport {
    pub leaves: usize,
    pub bad_paths: usize,
    pub bad_nodes: usize,
}

impl CorrectCountReport {
    pub fn passed(&self) -> bool {
        self.bad_paths == 0 && self.bad_nodes == 0
    }
}

/// Checks that every root-leaf path has weight exactly `1/|F|` and that the
/// outgoing weights of every internal node sum to exactly 1.
pub fn verify_correctcount(t: &Scdt) -> CorrectCountReport {
    let target = BigRational::new(BigInt::one(), BigInt::from(t.model_count()));
    let mut report = CorrectCountReport::default();
    let mut stack = vec![(t.root(), BigRational::one())];
    while let Some((u, w)) = stack.pop() {
        let node = t.node(u);
        if node.children.is_empty() {
            report.leaves += 1;
            if w != target {
                report.bad_paths += 1;
            }
            continue;
        }
        let sum: BigRational = node.children.iter().map(|e| &e.weight).sum();
        if !sum.is_one() {
            report.bad_nodes += 1;
        }
        for e in &node.children {
            stack.push((e.child, &w * &e.weight));
        }
    }
    report
}

fn mask_of(s: &[usize]) -> u64 {
    s.iter().fold(0, |m, &x| m | 1 << x)
}

/// `weight(P^u(S))`: total weight of `u`-to-leaf paths whose literals include
/// every element of `S` positively, by walking all such paths.
pub fn weight_of_path_family(t: &Scdt, u: usize, s: &[usize]) -> BigRational {
    let want = mask_of(s);
    let mut total = BigRational::zero();
    let mut stack = vec![(u, 0u64, BigRational::one())];
    while let Some((v, got, w)) = stack.pop() {
        let node = t.node(v);
        if node.children.is_empty() {
            if got & want == want {
                total += w;
            }
            continue;
        }
        for e in &node.children {
            let got = if e.lit.positive { got | 1 << e.lit.var } else { got };
            stack.push((e.child, got, &w * &e.weight));
        }
    }
    total
}

/// Same quantity through the path-family recursions: a branching variable in
/// `S` keeps only its positive edge, and on a negative edge every element of
/// `S` adjacent to the branching variable becomes forced and drops out of `S`.
/// Only meaningful for `φ(G)`.
pub fn weight_of_path_family_recursive(t: &Scdt, u: usize, s: &[usize]) -> Result<BigRational> {
    if !t.monotone2 {
        return Err(Error::pre("weight_of_path_family_recursive", "F is not a monotone 2-CNF"));
    }
    let want = mask_of(s);
    let node = t.node(u);
    if want & (node.pos | node.neg) != 0 {
        return Ok(BigRational::zero());
    }
    Ok(family_rec(t, u, want))
}

fn family_rec(t: &Scdt, u: usize, s: u64) -> BigRational {
    let node = t.node(u);
    let Some(x) = node.var else {
        return if s == 0 { BigRational::one() } else { BigRational::zero() };
    };
    let mut total = BigRational::zero();
    for e in &node.children {
        let rest = match (s >> x & 1 == 1, e.lit.positive) {
            (true, true) => s & !(1 << x),
            (true, false) => continue,
            (false, true) => s,
            (false, false) => s & !t.neighbor_mask(x),
        };
        total += &e.weight * family_rec(t, e.child, rest);
    }
    total
}

/// `c_d = 1 - 2^-(2d+1)`.
pub fn c_d(d: usize) -> BigRational {
    let den = BigInt::one() << (2 * d + 1);
    BigRational::new(&den - BigInt::one(), den)
}

/// `α^u(S) = ∏_{x in S} c_{|N^u(x)|}`.
pub fn alpha(t: &Scdt, u: usize, s: &[usize]) -> BigRational {
    s.iter()
        .map(|&x| c_d(t.free_neighbors(u, x).count_ones() as usize))
        .product()
}

/// Which sets `S` the weight bound applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisMode {
    /// No two elements adjacent or sharing a neighbour.
    Strict,
    /// No two elements adjacent.
    Lax,
}

/// Whether `s` meets the hypothesis at node `u`; the error names the clause.
pub fn check_hypothesis(t: &Scdt, u: usize, s: &[usize], mode: HypothesisMode) -> std::result::Result<(), String> {
    for (i, &a) in s.iter().enumerate() {
        if a >= t.num_vars() {
            return Err(format!("variable {} out of range", a + 1));
        }
        if t.is_forced(u, a) {
            return Err(format!("{} is forced to 1 by A_u", a + 1));
        }
        for &b in &s[i + 1..] {
            if a == b {
                return Err(format!("{} repeated", a + 1));
            }
            if t.neighbors[a] >> b & 1 == 1 {
                return Err(format!("{} and {} are neighbours", a + 1, b + 1));
            }
            if mode == HypothesisMode::Strict && t.neighbors[a] & t.neighbors[b] != 0 {
                return Err(format!("{} and {} have a common neighbour", a + 1, b + 1));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaintreeCheck {
    pub node: usize,
    pub set: Vec<usize>,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub pass: bool,
}

/// Compares `weight(P^u(S))` with `α^u(S)` for one node and set.
pub fn verify_maintree(t: &Scdt, u: usize, s: &[usize], mode: HypothesisMode) -> Result<MaintreeCheck> {
    if !t.monotone2 {
        return Err(Error::pre("verify_maintree", "F is not a monotone 2-CNF"));
    }
    if u >= t.nodes.len() {
        return Err(Error::invalid(format!("node {u} out of range")));
    }
    check_hypothesis(t, u, s, mode).map_err(|c| Error::pre("verify_maintree", c))?;
    let lhs = weight_of_path_family(t, u, s);
    let rhs = alpha(t, u, s);
    Ok(MaintreeCheck {
        node: u,
        set: s.to_vec(),
        pass: lhs <= rhs,
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, Default)]
pub struct MaintreeSweep {
    pub checked: usize,
    pub failures: Vec<MaintreeCheck>,
}

/// Every node against every admissible `S` of unassigned variables with
/// `|S| <= max_size`.
///
/// Sets touching `A_u` have an empty path family and are skipped. The left
/// side is computed as `c / |F^u|`, where `c` counts the leaves below `u`
/// whose models contain `S`: every `u`-to-leaf path weighs `1/|F^u|`, which
/// [`verify_correctcount`] checks exactly on the same tree.
pub fn maintree_sweep(t: &Scdt, max_size: usize, mode: HypothesisMode) -> Result<MaintreeSweep> {
    if !t.monotone2 {
        return Err(Error::pre("maintree_sweep", "F is not a monotone 2-CNF"));
    }
    let n = t.num_vars();
    let mut sweep = MaintreeSweep::default();
    let mut set = Vec::with_capacity(max_size);
    for u in 0..t.nodes.len() {
        let node = &t.nodes[u];
        let free: Vec<usize> = (0..n)
            .filter(|&v| (node.pos | node.neg) >> v & 1 == 0 && !t.is_forced(u, v))
            .collect();
        let degrees: Vec<u32> = (0..n).map(|x| t.free_neighbors(u, x).count_ones()).collect();
        let models = t.models_below(u);
        sweep_sets(t, mode, &free, 0, max_size, &mut set, &mut |s| {
            let want = mask_of(s);
            let hits = models.iter().filter(|&&m| m & want == want).count() as u64;
            sweep.checked += 1;
            if !bound_holds(hits, node.count, s.iter().map(|&x| degrees[x])) {
                sweep.failures.push(MaintreeCheck {
                    node: u,
                    set: s.to_vec(),
                    lhs: BigRational::new(hits.into(), node.count.into()),
                    rhs: alpha(t, u, s),
                    pass: false,
                });
            }
        });
    }
    Ok(sweep)
}

fn sweep_sets(
    t: &Scdt,
    mode: HypothesisMode,
    free: &[usize],
    start: usize,
    left: usize,
    set: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    visit(set);
    if left == 0 {
        return;
    }
    for i in start..free.len() {
        let x = free[i];
        let compatible = set.iter().all(|&y| {
            t.neighbors[x] >> y & 1 == 0 && (mode == HypothesisMode::Lax || t.neighbors[x] & t.neighbors[y] == 0)
        });
        if compatible {
            set.push(x);
            sweep_sets(t, mode, free, i + 1, left - 1, set, visit);
            set.pop();
        }
    }
}

/// `hits / total <= ∏ (1 - 2^-(2d+1))`, in integers.
fn bound_holds(hits: u64, total: u64, degrees: impl Iterator<Item = u32>) -> bool {
    let mut lhs = BigUint::from(hits);
    let mut rhs = BigUint::from(total);
    for d in degrees {
        let den = BigUint::one() << (2 * d + 1);
        rhs *= &den - BigUint::one();
        lhs *= den;
    }
    lhs <= rhs
}

/// Violations of the per-node edge-weight ranges.
#[derive(Clone, Debug, Default)]
pub struct WeightRangeReport {
    pub checked: usize,
    pub skipped_forced: usize,
    pub failures: Vec<(usize, String)>,
}

/// At every internal node `u` whose variable `x` is not forced by `A_u`: the
/// positive weight lies in `[1/2, 1 - 2^-(|N^u(x)|+1)]` and the negative
/// weight in `[2^-(|N^u(x)|+1), 1/2]`.
pub fn verify_largeportion_treeweights(t: &Scdt) -> Result<WeightRangeReport> {
    if !t.monotone2 {
        return Err(Error::pre("verify_largeportion_treeweights", "F is not a monotone 2-CNF"));
    }
    let mut report = WeightRangeReport::default();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for (u, node) in t.nodes.iter().enumerate() {
        let Some(x) = node.var else { continue };
        if t.is_forced(u, x) {
            report.skipped_forced += 1;
            continue;
        }
        report.checked += 1;
        let k = t.free_neighbors(u, x).count_ones() as usize + 1;
        let low = BigRational::new(BigInt::one(), BigInt::one() << k);
        let high = BigRational::one() - &low;
        let weight = |positive: bool| {
            node.children
                .iter()
                .find(|e| e.lit.positive == positive)
                .map_or_else(BigRational::zero, |e| e.weight.clone())
        };
        let (wp, wn) = (weight(true), weight(false));
        if wp < half || wp > high {
            report.failures.push((u, format!("positive weight {wp} outside [1/2, {high}]")));
        }
        if wn < low || wn > half {
            report.failures.push((u, format!("negative weight {wn} outside [{low}, 1/2]")));
        }
    }
    Ok(report)
}

/// Violations of the three alpha comparison lemmas across tree edges.
#[derive(Clone, Debug, Default)]
pub struct AlphaLemmaReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Sweeps the alpha inequalities along every tree edge, for every `S` of at
/// most `max_size` variables that are neither assigned nor forced at the
/// parent: monotonicity from parent to child, the positive step for `x ∈ S`,
/// and the recombination over both children when `S` contains a neighbour `y`
/// of an unforced `x`.
pub fn verify_alpha_lemmas(t: &Scdt, max_size: usize) -> AlphaLemmaReport {
    let n = t.num_vars();
    let mut report = AlphaLemmaReport::default();
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for s in &subsets {
            let from = s.last().map_or(0, |&l| l + 1);
            for v in from..n {
                let mut t2 = s.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        subsets.extend(next.into_iter().filter(|s| s.len() <= max_size));
        subsets.sort();
        subsets.dedup();
    }
    for (u, node) in t.nodes.iter().enumerate() {
        let Some(x) = node.var else { continue };
        for e in &node.children {
            for y in 0..n {
                if t.free_neighbors(e.child, y) & !t.free_neighbors(u, y) != 0 {
                    report.failures.push(format!("N^v({}) not inside N^u at edge {u}->{}", y + 1, e.child));
                }
            }
        }
        let vp = node.children.iter().find(|e| e.lit.positive);
        let vn = node.children.iter().find(|e| !e.lit.positive);
        let unset = !(node.pos | node.neg);
        for s in subsets.iter().filter(|s| s.iter().all(|&y| unset >> y & 1 == 1 && !t.is_forced(u, y))) {
            let a_u = alpha(t, u, s);
            for e in &node.children {
                report.checked += 1;
                if alpha(t, e.child, s) > a_u {
                    report.failures.push(format!("alpha grew on edge {u}->{} for {s:?}", e.child));
                }
            }
            if let (true, Some(vp)) = (s.contains(&x), vp) {
                report.checked += 1;
                let rest: Vec<usize> = s.iter().copied().filter(|&y| y != x).collect();
                if &vp.weight * alpha(t, vp.child, &rest) > a_u {
                    report.failures.push(format!("positive step fails at {u} for {s:?}"));
                }
            }
            if let (false, Some(vp), Some(vn)) = (t.is_forced(u, x), vp, vn) {
                for &y in s.iter().filter(|&&y| t.neighbors[x] >> y & 1 == 1) {
                    report.checked += 1;
                    let rest: Vec<usize> = s.iter().copied().filter(|&z| z != y).collect();
                    let lhs = &vp.weight * alpha(t, vp.child, s) + &vn.weight * alpha(t, vn.child, &rest);
                    if lhs > a_u {
                        report.failures.push(format!("recombination fails at {u} for {s:?}, y = {}", y + 1));
                    }
                }
            }
        }
    }
    report
}

/// Exact data for the bound `|φ(G) ← U| <= |φ(G)| / 2^(|U| / b_d)` with
/// `b_d = (d+1) / log2(1/c_d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manyvars1Report {
    pub vertices: usize,
    pub max_degree: usize,
    pub u: Vec<usize>,
    pub phi_count: BigUint,
    pub arrow_count: BigUint,
    /// The stated inequality, decided exactly as
    /// `(|φ←U| / |φ|)^(d+1) <= c_d^|U|`.
    pub holds: bool,
    pub mode: SubsetMode,
    pub subset: Vec<usize>,
    pub subset_arrow_count: BigUint,
    /// `|φ←S| / |φ| <= c_d^|S|` for the extracted subset `S`.
    pub subset_bound_holds: bool,
}

fn ratio_power_le(num: &BigUint, den: &BigUint, power: u32, d: usize, k: usize) -> bool {
    // (num/den)^power <= ((2^(2d+1) - 1) / 2^(2d+1))^k
    let c_den = BigUint::one() << (2 * d + 1);
    let c_num = &c_den - BigUint::one();
    num.pow(power) * c_den.pow(k as u32) <= den.pow(power) * c_num.pow(k as u32)
}

pub fn verify_manyvars1(g: &Graph, u: &[usize], cap: usize, mode: SubsetMode) -> Result<Manyvars1Report> {
    let phi = phi_of_graph(g)?;
    let mut us = u.to_vec();
    us.sort_unstable();
    us.dedup();
    if let Some(&x) = us.iter().find(|&&x| x >= g.vertex_count()) {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    let d = g.max_degree();
    let phi_count = count_models_capped(&phi, cap, &LiteralSet::new())?;
    let arrow_count = count_models_capped(&phi, cap, &LiteralSet::positive(us.iter().copied()))?;
    let holds = ratio_power_le(&arrow_count, &phi_count, (d + 1) as u32, d, us.len());
    let subset = independent_subset(g, &us, mode)?;
    let subset_arrow_count = count_models_capped(&phi, cap, &LiteralSet::positive(subset.iter().copied()))?;
    let subset_bound_holds = ratio_power_le(&subset_arrow_count, &phi_count, 1, d, subset.len());
    Ok(Manyvars1Report {
        vertices: g.vertex_count(),
        max_degree: d,
        u: us,
        phi_count,
        arrow_count,
        holds,
        mode,
        subset,
        subset_arrow_count,
        subset_bound_holds,
    })
}
