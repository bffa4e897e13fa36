//! Nondeterministic read-once branching programs: validation, the function a
//! program represents, order-built programs, fixed sets of matchings, and the
//! single- and multi-bottleneck analyses of `φ(G)` approximants.

use std::cell::OnceCell;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::Rng;

use crate::cnf::{Lit, ModelSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{max_matching_across_cut, Matching};
use crate::width::witnessing_matching_exact;

/// Default cap on enumerated source-sink paths.
pub const DEFAULT_PATH_CAP: u128 = 100_000;
pub const MAX_NROBP_VARS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NrobpEdge {
    pub from: usize,
    pub to: usize,
    pub lit: Option<Lit>,
}

/// Per-vertex variable sets, valid once the program passes [`Nrobp::validate`].
/// Masks have bit `v` for variable `v`.
#[derive(Clone, Debug)]
pub struct Layout {
    pub topo: Vec<usize>,
    /// Variables read on every source-to-vertex path.
    pub before: Vec<u64>,
    /// Variables read on every vertex-to-sink path.
    pub after: Vec<u64>,
    /// Variables read negatively on some source-to-vertex path.
    pub neg_before: Vec<u64>,
    /// Variables read negatively on some vertex-to-sink path.
    pub neg_after: Vec<u64>,
    /// Path counts from the source and to the sink, saturating.
    pub paths_to: Vec<u128>,
    pub paths_from: Vec<u128>,
}

#[derive(Clone, Debug)]
pub struct Nrobp {
    num_nodes: usize,
    num_vars: usize,
    source: usize,
    sink: usize,
    edges: Vec<NrobpEdge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    layout: OnceCell<Option<Layout>>,
}

/// A violated clause of the program invariants, with a witness. Paths are
/// lists of edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ExtraSource(usize),
    ExtraSink(usize),
    SourceHasIncoming(usize),
    SinkHasOutgoing(usize),
    Cycle(Vec<usize>),
    RepeatedVariable { var: usize, path: Vec<usize> },
    MissingVariable { var: usize, path: Vec<usize> },
    MixedVariableSets { node: usize, first: Vec<usize>, second: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |path: &Vec<usize>| format!("{path:?}");
        match self {
            Violation::ExtraSource(v) => write!(f, "node {v} has no incoming edge but is not the source"),
            Violation::ExtraSink(v) => write!(f, "node {v} has no outgoing edge but is not the sink"),
            Violation::SourceHasIncoming(v) => write!(f, "source {v} has an incoming edge"),
            Violation::SinkHasOutgoing(v) => write!(f, "sink {v} has an outgoing edge"),
            Violation::Cycle(nodes) => write!(f, "cycle through nodes {nodes:?}"),
            Violation::RepeatedVariable { var, path } => {
                write!(f, "variable {} read twice on edges {}", var + 1, p(path))
            }
            Violation::MissingVariable { var, path } => {
                write!(f, "variable {} never read on edges {}", var + 1, p(path))
            }
            Violation::MixedVariableSets { node, first, second } => write!(
                f,
                "paths {} and {} reach node {node} with different variable sets",
                p(first),
                p(second)
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Nrobp {
    pub fn new(num_nodes: usize, num_vars: usize, source: usize, sink: usize, edges: Vec<NrobpEdge>) -> Result<Self> {
        if num_vars > MAX_NROBP_VARS {
            return Err(Error::cap("program variables", num_vars as u128, MAX_NROBP_VARS as u128));
        }
        if source >= num_nodes || sink >= num_nodes {
            return Err(Error::invalid("source or sink out of range"));
        }
        let mut out = vec![Vec::new(); num_nodes];
        let mut inc = vec![Vec::new(); num_nodes];
        for (i, e) in edges.iter().enumerate() {
            if e.from >= num_nodes || e.to >= num_nodes {
                return Err(Error::invalid(format!("edge {} -> {} has an endpoint out of range", e.from, e.to)));
            }
            if let Some(l) = e.lit {
                if l.var >= num_vars {
                    return Err(Error::invalid(format!("edge {} -> {} reads undeclared variable {}", e.from, e.to, l.var + 1)));
                }
            }
            out[e.from].push(i);
            inc[e.to].push(i);
        }
        Ok(Nrobp {
            num_nodes,
            num_vars,
            source,
            sink,
            edges,
            out,
            inc,
            layout: OnceCell::new(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[NrobpEdge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn validate(&self) -> ValidationReport {
        self.analyze().0
    }

    /// Per-vertex sets of a valid program; a precondition error otherwise.
    pub fn layout(&self) -> Result<&Layout> {
        self.layout
            .get_or_init(|| self.analyze().1)
            .as_ref()
            .ok_or_else(|| {
                let first = self.validate().violations.into_iter().next().expect("invalid program has a violation");
                Error::pre("nrobp", first.to_string())
            })
    }

    fn analyze(&self) -> (ValidationReport, Option<Layout>) {
        let mut violations = Vec::new();
        for v in 0..self.num_nodes {
            if self.inc[v].is_empty() && v != self.source {
                violations.push(Violation::ExtraSource(v));
            }
            if self.out[v].is_empty() && v != self.sink {
                violations.push(Violation::ExtraSink(v));
            }
        }
        if !self.inc[self.source].is_empty() {
            violations.push(Violation::SourceHasIncoming(self.source));
        }
        if !self.out[self.sink].is_empty() {
            violations.push(Violation::SinkHasOutgoing(self.sink));
        }
        let topo = match self.topological_order() {
            Ok(t) => t,
            Err(cycle) => {
                violations.push(Violation::Cycle(cycle));
                return (ValidationReport { violations }, None);
            }
        };
        let n = self.num_nodes;
        let mut before = vec![0u64; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut reached = vec![false; n];
        reached[self.source] = true;
        for &v in &topo {
            let mut mixed = false;
            for &ei in &self.inc[v] {
                let e = self.edges[ei];
                if !reached[e.from] {
                    continue;
                }
                let mut m = before[e.from];
                if let Some(l) = e.lit {
                    if m >> l.var & 1 == 1 {
                        let mut path = self.pred_path(&pred, e.from);
                        path.push(ei);
                        violations.push(Violation::RepeatedVariable { var: l.var, path });
                    }
                    m |= 1 << l.var;
                }
                if !reached[v] {
                    reached[v] = true;
                    before[v] = m;
                    pred[v] = Some(ei);
                } else if m != before[v] && !mixed {
                    mixed = true;
                    let mut second = self.pred_path(&pred, e.from);
                    second.push(ei);
                    violations.push(Violation::MixedVariableSets {
                        node: v,
                        first: self.pred_path(&pred, v),
                        second,
                    });
                }
            }
        }
        let full = if self.num_vars == 64 { u64::MAX } else { (1u64 << self.num_vars) - 1 };
        if reached[self.sink] {
            for var in (0..self.num_vars).filter(|&x| before[self.sink] >> x & 1 == 0) {
                violations.push(Violation::MissingVariable {
                    var,
                    path: self.pred_path(&pred, self.sink),
                });
            }
        }
        let report = ValidationReport { violations };
        if !report.is_valid() {
            return (report, None);
        }
        let after: Vec<u64> = before.iter().map(|&b| full & !b).collect();
        let neg = |e: &NrobpEdge| e.lit.filter(|l| !l.positive).map_or(0, |l| 1u64 << l.var);
        let mut neg_before = vec![0u64; n];
        let mut paths_to = vec![0u128; n];
        paths_to[self.source] = 1;
        for &v in &topo {
            for &ei in &self.inc[v] {
                let e = &self.edges[ei];
                neg_before[v] |= neg_before[e.from] | neg(e);
                paths_to[v] = paths_to[v].saturating_add(paths_to[e.from]);
            }
        }
        let mut neg_after = vec![0u64; n];
        let mut paths_from = vec![0u128; n];
        paths_from[self.sink] = 1;
        for &v in topo.iter().rev() {
            for &ei in &self.out[v] {
                let e = &self.edges[ei];
                neg_after[v] |= neg_after[e.to] | neg(e);
                paths_from[v] = paths_from[v].saturating_add(paths_from[e.to]);
            }
        }
        let layout = Layout {
            topo,
            before,
            after,
            neg_before,
            neg_after,
            paths_to,
            paths_from,
        };
        (report, Some(layout))
    }

    fn pred_path(&self, pred: &[Option<usize>], mut v: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some(ei) = pred[v] {
            path.push(ei);
            v = self.edges[ei].from;
        }
        path.reverse();
        path
    }

    /// Kahn's algorithm; on failure returns the nodes of one cycle.
    fn topological_order(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        let n = self.num_nodes;
        let mut indeg: Vec<usize> = self.inc.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &ei in &self.out[v] {
                let w = self.edges[ei].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // every leftover node has a leftover predecessor; walk back until a repeat
        let mut seen = vec![usize::MAX; n];
        let mut v = (0..n).find(|&v| indeg[v] > 0).expect("leftover node");
        let mut walk = Vec::new();
        while seen[v] == usize::MAX {
            seen[v] = walk.len();
            walk.push(v);
            v = self.inc[v]
                .iter()
                .map(|&ei| self.edges[ei].from)
                .find(|&u| indeg[u] > 0)
                .expect("leftover predecessor");
        }
        let mut cycle = walk[seen[v]..].to_vec();
        cycle.reverse();
        Err(cycle)
    }

    /// Number of source-sink paths, saturating at `u128::MAX`.
    pub fn path_count(&self) -> Result<u128> {
        Ok(self.layout()?.paths_from[self.source])
    }

    /// Calls `f` on every source-sink path (edge indices), depth first in edge
    /// order.
    pub fn for_each_path(&self, cap: u128, mut f: impl FnMut(&[usize])) -> Result<()> {
        let count = self.path_count()?;
        if count > cap {
            return Err(Error::cap("source-sink paths", count, cap));
        }
        let mut path = Vec::new();
        let mut stack: Vec<(usize, usize)> = vec![(self.source, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if v == self.sink {
                f(&path);
                stack.pop();
                path.pop();
                continue;
            }
            if next < self.out[v].len() {
                top.1 += 1;
                let ei = self.out[v][next];
                path.push(ei);
                stack.push((self.edges[ei].to, 0));
            } else {
                stack.pop();
                path.pop();
            }
        }
        Ok(())
    }

    pub fn paths(&self, cap: u128) -> Result<Vec<Vec<usize>>> {
        let mut all = Vec::new();
        self.for_each_path(cap, |p| all.push(p.to_vec()))?;
        Ok(all)
    }

    /// Nodes visited by a path, source first.
    pub fn path_nodes(&self, path: &[usize]) -> Vec<usize> {
        let mut nodes = vec![path.first().map_or(self.source, |&e| self.edges[e].from)];
        nodes.extend(path.iter().map(|&e| self.edges[e].to));
        nodes
    }

    /// Variables read positively on the path, bit `v` for variable `v`.
    pub fn positive_mask(&self, path: &[usize]) -> u64 {
        path.iter()
            .filter_map(|&e| self.edges[e].lit)
            .filter(|l| l.positive)
            .fold(0, |m, l| m | 1 << l.var)
    }

    /// Some path from `a` to `b`, by breadth-first search.
    pub fn find_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut pred: Vec<Option<usize>> = vec![None; self.num_nodes];
        let mut seen = vec![false; self.num_nodes];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                let mut path = Vec::new();
                let mut w = b;
                while w != a {
                    let ei = pred[w].expect("bfs predecessor");
                    path.push(ei);
                    w = self.edges[ei].from;
                }
                path.reverse();
                return Some(path);
            }
            for &ei in &self.out[v] {
                let w = self.edges[ei].to;
                if !seen[w] {
                    seen[w] = true;
                    pred[w] = Some(ei);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Header `nrobp <#nodes> <#edges> <source> <sink> <n>`, then one
    /// `u v [±var]` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "nrobp {} {} {} {} {}\n",
            self.num_nodes,
            self.edges.len(),
            self.source,
            self.sink,
            self.num_vars
        );
        for e in &self.edges {
            match e.lit {
                Some(l) => out.push_str(&format!("{} {} {l}\n", e.from, e.to)),
                None => out.push_str(&format!("{} {}\n", e.from, e.to)),
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut header: Option<[usize; 5]> = None;
        let mut edges = Vec::new();
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            last = ln;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad number `{s}`")));
            let Some(h) = header else {
                if parts.len() != 6 || parts[0] != "nrobp" {
                    return Err(Error::parse(ln, "header must be `nrobp <#nodes> <#edges> <source> <sink> <n>`"));
                }
                header = Some([num(parts[1])?, num(parts[2])?, num(parts[3])?, num(parts[4])?, num(parts[5])?]);
                continue;
            };
            let lit = match parts.len() {
                2 => None,
                3 => {
                    let v: i64 = parts[2]
                        .parse()
                        .map_err(|_| Error::parse(ln, format!("bad literal `{}`", parts[2])))?;
                    if v == 0 || v.unsigned_abs() as usize > h[4] {
                        return Err(Error::parse(ln, format!("literal `{}` out of range", parts[2])));
                    }
                    Some(Lit {
                        var: v.unsigned_abs() as usize - 1,
                        positive: v > 0,
                    })
                }
                _ => return Err(Error::parse(ln, "edge line must be `u v [±var]`")),
            };
            edges.push(NrobpEdge {
                from: num(parts[0])?,
                to: num(parts[1])?,
                lit,
            });
        }
        let [nodes, m, source, sink, n] = header.ok_or_else(|| Error::parse(1, "missing header"))?;
        if edges.len() != m {
            return Err(Error::parse(last, format!("header declares {m} edges, found {}", edges.len())));
        }
        Nrobp::new(nodes, n, source, sink, edges)
    }
}

/// Converts a mask with bit `v` for variable `v` to [`ModelSet`] packing.
fn to_packed(mask: u64, n: usize) -> u64 {
    (0..n).filter(|&v| mask >> v & 1 == 1).fold(0, |m, v| m | 1 << (n - 1 - v))
}

fn from_packed(packed: u64, n: usize) -> u64 {
    (0..n).filter(|&v| packed >> (n - 1 - v) & 1 == 1).fold(0, |m, v| m | 1 << v)
}

/// `{A(P) : P a source-sink path}`.
pub fn represented_function(z: &Nrobp, cap: u128) -> Result<ModelSet> {
    let n = z.num_vars();
    let mut models = Vec::new();
    z.for_each_path(cap, |p| models.push(to_packed(z.positive_mask(p), n)))?;
    ModelSet::from_packed((0..n).collect(), models)
}

/// Layered program reading the variables in `order`, with one node per
/// distinct residual function in each layer.
pub fn build_order_nrobp(f: &ModelSet, order: &[usize]) -> Result<Nrobp> {
    let n = f.vars().len();
    if f.vars().iter().enumerate().any(|(i, &v)| i != v) {
        return Err(Error::invalid("model set must range over variables 0..n"));
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::invalid("order must list every variable exactly once"));
    }
    if f.is_empty() {
        return Err(Error::pre("build_order_nrobp", "F is empty"));
    }
    let mut keys: Vec<u64> = f
        .packed()
        .iter()
        .map(|&m| {
            order
                .iter()
                .enumerate()
                .filter(|&(_, &v)| m >> (n - 1 - v) & 1 == 1)
                .fold(0, |k, (j, _)| k | 1 << (n - 1 - j))
        })
        .collect();
    keys.sort_unstable();
    let mut edges = Vec::new();
    let mut layer: Vec<(usize, Vec<u64>)> = vec![(0, keys)];
    let mut next_id = 1;
    for (j, &x) in order.iter().enumerate() {
        let bit = 1u64 << (n - 1 - j);
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut next: Vec<(usize, Vec<u64>)> = Vec::new();
        for (node, set) in &layer {
            let pos: Vec<u64> = set.iter().filter(|&&k| k & bit != 0).map(|&k| k & !bit).collect();
            let neg: Vec<u64> = set.iter().filter(|&&k| k & bit == 0).copied().collect();
            for (positive, residual) in [(true, pos), (false, neg)] {
                if residual.is_empty() {
                    continue;
                }
                let id = *index.entry(residual.clone()).or_insert_with(|| {
                    next.push((next_id, residual));
                    next_id += 1;
                    next_id - 1
                });
                edges.push(NrobpEdge {
                    from: *node,
                    to: id,
                    lit: Some(Lit { var: x, positive }),
                });
            }
        }
        layer = next;
    }
    debug_assert_eq!(layer.len(), 1);
    Nrobp::new(next_id, n, 0, next_id - 1, edges)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// All of `X` before the vertex and all of `Y` after it.
    XBeforeY,
    YBeforeX,
    No(String),
}

impl Separation {
    pub fn holds(&self) -> bool {
        !matches!(self, Separation::No(_))
    }
}

pub fn separates(z: &Nrobp, v: usize, x: &[usize], y: &[usize]) -> Result<Separation> {
    let layout = z.layout()?;
    if v >= z.num_nodes() {
        return Err(Error::invalid(format!("node {v} out of range")));
    }
    let (before, after) = (layout.before[v], layout.after[v]);
    let side = |s: &[usize], mask: u64| s.iter().all(|&a| a < 64 && mask >> a & 1 == 1);
    if let Some(&a) = x.iter().chain(y).find(|&&a| a >= z.num_vars()) {
        return Ok(Separation::No(format!("variable {} is read on neither side of node {v}", a + 1)));
    }
    Ok(if side(x, before) && side(y, after) {
        Separation::XBeforeY
    } else if side(y, before) && side(x, after) {
        Separation::YBeforeX
    } else {
        Separation::No(format!("node {v} does not separate {x:?} from {y:?}"))
    })
}

/// One end of every edge of `m`, chosen so that every source-sink path through
/// `u` reads it positively. Sorted.
pub fn fixed_set(z: &Nrobp, u: usize, m: &Matching) -> Result<Vec<usize>> {
    let layout = z.layout()?;
    if u >= z.num_nodes() {
        return Err(Error::invalid(format!("node {u} out of range")));
    }
    let n = z.num_vars();
    let mut x = Vec::with_capacity(m.len());
    for &(a, b) in m.pairs() {
        if a >= n || b >= n {
            return Err(Error::invalid(format!("matching edge {{{a}, {b}}} out of range")));
        }
        let before = |v: usize| layout.before[u] >> v & 1 == 1;
        let (early, late) = match (before(a), before(b)) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => {
                return Err(Error::pre(
                    "fixed_set",
                    format!("edge {{{}, {}}} is not separated by node {u}", a + 1, b + 1),
                ))
            }
        };
        if layout.neg_before[u] >> early & 1 == 0 {
            x.push(early);
        } else if layout.neg_after[u] >> late & 1 == 0 {
            x.push(late);
        } else {
            let path = falsifying_path(z, u, early, late).expect("negations reach u");
            return Err(Error::pre(
                "fixed_set",
                format!(
                    "F is not contained in φ(G): path through nodes {:?} reads -{} and -{}",
                    z.path_nodes(&path),
                    early + 1,
                    late + 1
                ),
            ));
        }
    }
    x.sort_unstable();
    Ok(x)
}

/// A source-`u`-sink path reading `¬early` before `u` and `¬late` after it.
fn falsifying_path(z: &Nrobp, u: usize, early: usize, late: usize) -> Option<Vec<usize>> {
    let via = |target: Lit, from: usize, to: usize| -> Option<Vec<usize>> {
        z.edges().iter().enumerate().find_map(|(ei, e)| {
            if e.lit != Some(target) {
                return None;
            }
            let mut head = z.find_path(from, e.from)?;
            let tail = z.find_path(e.to, to)?;
            head.push(ei);
            head.extend(tail);
            Some(head)
        })
    };
    let mut path = via(Lit::neg(early), z.source(), u)?;
    path.extend(via(Lit::neg(late), u, z.sink())?);
    Some(path)
}

fn node_sets(z: &Nrobp, paths: &[Vec<usize>]) -> Vec<FixedBitSet> {
    paths
        .iter()
        .map(|p| {
            let mut mark = FixedBitSet::with_capacity(z.num_nodes());
            for v in z.path_nodes(p) {
                mark.insert(v);
            }
            mark
        })
        .collect()
}

/// Paths (as indices) whose node set holds every node of `nodes`.
fn through_all(sets: &[FixedBitSet], nodes: &[usize]) -> Vec<usize> {
    (0..sets.len())
        .filter(|&i| nodes.iter().all(|&v| sets[i].contains(v)))
        .collect()
}

/// `F_a`: models of `F` carried by paths through every node of `nodes`.
pub fn models_through(z: &Nrobp, nodes: &[usize], cap: u128) -> Result<ModelSet> {
    let paths = z.paths(cap)?;
    let n = z.num_vars();
    let models = through_all(&node_sets(z, &paths), nodes)
        .into_iter()
        .map(|i| to_packed(z.positive_mask(&paths[i]), n))
        .collect();
    ModelSet::from_packed((0..n).collect(), models)
}

fn check_graph(z: &Nrobp, g: &Graph) -> Result<()> {
    if g.vertex_count() != z.num_vars() {
        return Err(Error::invalid(format!(
            "graph has {} vertices but the program reads {} variables",
            g.vertex_count(),
            z.num_vars()
        )));
    }
    Ok(())
}

fn all_vertices(n: usize) -> FixedBitSet {
    let mut v = FixedBitSet::with_capacity(n);
    v.insert_range(..);
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutVertex {
    pub node: usize,
    /// Size of the matching used for the fixed set.
    pub matching: usize,
    pub fixed: Vec<usize>,
    /// `|F ← U_a|`.
    pub share: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleBottleneck {
    pub paths: usize,
    pub f_size: usize,
    /// The distinct vertices `a(P)`, by node id.
    pub cut: Vec<CutVertex>,
    /// `F = ∪_a F ← U_a`, checked model by model.
    pub union_identity: bool,
    /// `|F| <= Σ_a |F ← U_a|`.
    pub union_bound: bool,
    /// Paths through some `a` that miss part of `U_a`.
    pub containment_failures: usize,
}

impl SingleBottleneck {
    pub fn passed(&self) -> bool {
        self.union_identity && self.union_bound && self.containment_failures == 0
    }
}

/// For every path, the vertex after the split where the exact witnessing
/// matching over the path's variable order peaks, and the fixed set there.
pub fn single_bottleneck(z: &Nrobp, g: &Graph, cap: u128) -> Result<SingleBottleneck> {
    check_graph(z, g)?;
    let paths = z.paths(cap)?;
    let n = z.num_vars();
    let all = all_vertices(n);
    let mut first_at: BTreeMap<usize, Matching> = BTreeMap::new();
    let mut path_cut = Vec::with_capacity(paths.len());
    for p in &paths {
        let labelled: Vec<usize> = (0..p.len()).filter(|&i| z.edges()[p[i]].lit.is_some()).collect();
        let sv: Vec<usize> = labelled.iter().map(|&i| z.edges()[p[i]].lit.expect("labelled").var).collect();
        let w = witnessing_matching_exact(g, &all, &sv)?;
        let nodes = z.path_nodes(p);
        let a = if w.split == 0 { nodes[0] } else { nodes[labelled[w.split - 1] + 1] };
        first_at.entry(a).or_insert(w.matching);
        path_cut.push(a);
    }
    let masks: Vec<u64> = paths.iter().map(|p| z.positive_mask(p)).collect();
    let mut distinct = masks.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut cut = Vec::new();
    let mut fixed_masks: BTreeMap<usize, u64> = BTreeMap::new();
    for (&node, m) in &first_at {
        let fixed = fixed_set(z, node, m)?;
        let fm = fixed.iter().fold(0u64, |acc, &x| acc | 1 << x);
        fixed_masks.insert(node, fm);
        cut.push(CutVertex {
            node,
            matching: m.len(),
            share: distinct.iter().filter(|&&s| s & fm == fm).count(),
            fixed,
        });
    }
    let union_identity = distinct
        .iter()
        .all(|&s| fixed_masks.values().any(|&fm| s & fm == fm));
    let union_bound = distinct.len() <= cut.iter().map(|c| c.share).sum::<usize>();
    let mut containment_failures = 0;
    for (p, &mask) in paths.iter().zip(&masks) {
        for v in z.path_nodes(p) {
            if let Some(&fm) = fixed_masks.get(&v) {
                if mask & fm != fm {
                    containment_failures += 1;
                }
            }
        }
    }
    debug_assert!(path_cut.iter().all(|a| fixed_masks.contains_key(a)));
    Ok(SingleBottleneck {
        paths: paths.len(),
        f_size: distinct.len(),
        cut,
        union_identity,
        union_bound,
        containment_failures,
    })
}

/// Block sizes for `n` variables. The default is `√n` blocks of `√n` when `n`
/// is a square; otherwise blocks of `⌈√n⌉` with the last two merged. An
/// explicit `q` splits as evenly as possible.
pub fn block_sizes(n: usize, q: Option<usize>) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::invalid("no variables to partition"));
    }
    if let Some(q) = q {
        if q == 0 || q > n {
            return Err(Error::invalid(format!("block count {q} outside 1..={n}")));
        }
        return Ok((0..q).map(|i| n / q + usize::from(i < n % q)).collect());
    }
    let s = (1..=n).find(|s| s * s >= n).expect("n >= 1");
    if s * s == n {
        return Ok(vec![s; s]);
    }
    let r = n.div_ceil(s);
    if r == 1 {
        return Ok(vec![n]);
    }
    let mut sizes = vec![s; r - 2];
    sizes.push(n - s * (r - 2));
    Ok(sizes)
}

/// Where the far ends of a block's prefix matching lie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Within,
    Before,
    After,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleBlock {
    /// Positions on the path's node list of the block's first and last vertex.
    pub first: usize,
    pub last: usize,
    pub vars: Vec<usize>,
    pub prefix_len: usize,
    /// Largest matching between the prefix variables and the rest of `G`.
    pub prefix_matching: Matching,
    pub location: Location,
    /// Edges of the prefix matching whose far end lies at `location`.
    pub kept: Matching,
    /// Position of the component on the path's node list.
    pub position: usize,
    pub fixed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicTuple {
    pub components: Vec<usize>,
    pub blocks: Vec<TupleBlock>,
    /// Union of the per-block fixed sets.
    pub u: Vec<usize>,
    /// Number of distinct edges over all kept matchings.
    pub union_size: usize,
    /// Largest number of blocks keeping the same edge.
    pub max_multiplicity: usize,
}

impl CharacteristicTuple {
    pub fn multiplicity_ok(&self) -> bool {
        self.max_multiplicity <= 2
    }

    pub fn cover_ok(&self) -> bool {
        7 * self.u.len() >= self.union_size
    }

    pub fn u_mask(&self) -> u64 {
        self.u.iter().fold(0, |m, &x| m | 1 << x)
    }
}

/// The characteristic tuple of `path` (edge indices).
///
/// A prefix is picked per block maximizing the cut matching, shortest first
/// among ties. The popular location breaks ties as within, before, after. For
/// the within location the component is the last vertex of the prefix, since
/// the last vertex of the block would leave both ends of those edges before it.
pub fn characteristic_tuple(z: &Nrobp, g: &Graph, path: &[usize], q: Option<usize>) -> Result<CharacteristicTuple> {
    check_graph(z, g)?;
    z.layout()?;
    let n = z.num_vars();
    let labelled: Vec<usize> = (0..path.len()).filter(|&i| z.edges()[path[i]].lit.is_some()).collect();
    if labelled.len() != n {
        return Err(Error::invalid("not a source-sink path of the program"));
    }
    let nodes = z.path_nodes(path);
    let order: Vec<usize> = labelled.iter().map(|&i| z.edges()[path[i]].lit.expect("labelled").var).collect();
    let mut var_pos = vec![0; n];
    for (j, &v) in order.iter().enumerate() {
        var_pos[v] = j;
    }
    // node position after the first `j` labelled edges
    let after = |j: usize| if j == 0 { 0 } else { labelled[j - 1] + 1 };
    let sizes = block_sizes(n, q)?;
    let mut blocks = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for (bi, &len) in sizes.iter().enumerate() {
        let end = start + len;
        let first = after(start);
        let last = if bi + 1 == sizes.len() { nodes.len() - 1 } else { after(end) };
        let mut side = FixedBitSet::with_capacity(n);
        let mut best = (Matching::new(), 0);
        for t in 1..=len {
            side.insert(order[start + t - 1]);
            let m = max_matching_across_cut(g, &side);
            if m.len() > best.0.len() {
                best = (m, t);
            }
        }
        let (prefix_matching, prefix_len) = best;
        let in_prefix = |v: usize| (start..start + prefix_len).contains(&var_pos[v]);
        let locate = |(a, b): (usize, usize)| {
            let far = if in_prefix(a) { b } else { a };
            match var_pos[far] {
                p if p < start => Location::Before,
                p if p < end => Location::Within,
                _ => Location::After,
            }
        };
        let mut counts: BTreeMap<Location, usize> = BTreeMap::new();
        for &e in prefix_matching.pairs() {
            *counts.entry(locate(e)).or_default() += 1;
        }
        let top = counts.values().copied().max().unwrap_or(0);
        let location = [Location::Within, Location::Before, Location::After]
            .into_iter()
            .find(|l| counts.get(l).copied().unwrap_or(0) == top)
            .expect("three locations");
        let kept = Matching::from_pairs(prefix_matching.pairs().iter().copied().filter(|&e| locate(e) == location));
        let position = match location {
            Location::Within => after(start + prefix_len),
            Location::Before => first,
            Location::After => last,
        };
        let fixed = fixed_set(z, nodes[position], &kept)?;
        blocks.push(TupleBlock {
            first,
            last,
            vars: order[start..end].to_vec(),
            prefix_len,
            prefix_matching,
            location,
            kept,
            position,
            fixed,
        });
        start = end;
    }
    let mut multiplicity: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for b in &blocks {
        for &e in b.kept.pairs() {
            *multiplicity.entry(e).or_default() += 1;
        }
    }
    let mut u: Vec<usize> = blocks.iter().flat_map(|b| b.fixed.iter().copied()).collect();
    u.sort_unstable();
    u.dedup();
    Ok(CharacteristicTuple {
        components: blocks.iter().map(|b| nodes[b.position]).collect(),
        blocks,
        u,
        union_size: multiplicity.len(),
        max_multiplicity: multiplicity.values().copied().max().unwrap_or(0),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleRow {
    pub components: Vec<usize>,
    pub u: Vec<usize>,
    /// `|F_a|`.
    pub f_a: usize,
    /// `|F ← U|`.
    pub arrow_u: usize,
    /// Paths whose own tuple is this one.
    pub owners: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BottleneckCensus {
    pub n: usize,
    pub q: usize,
    pub paths: usize,
    pub f_size: usize,
    pub tuples: Vec<TupleRow>,
    /// `B_i`, sorted node ids.
    pub bottlenecks: Vec<Vec<usize>>,
    pub mu: usize,
    /// `F = ∪_a F_a`, checked model by model.
    pub covering_identity: bool,
    /// Paths through all components of a tuple missing part of its `U`.
    pub containment_failures: usize,
    pub max_multiplicity: usize,
    /// Tuples with `7|U| < |∪M_i|`.
    pub cover_failures: usize,
    pub min_u: usize,
    pub max_union: usize,
    /// `|TP| <= ∏|B_i|`.
    pub tp_le_product: bool,
    /// `|TP| <= μ^q`.
    pub tp_le_mu_q: bool,
    /// `|F| <= |F_b| * |TP|` with `F_b` the largest `F_a`.
    pub largest_share_bound: bool,
}

impl BottleneckCensus {
    pub fn passed(&self) -> bool {
        self.covering_identity
            && self.containment_failures == 0
            && self.max_multiplicity <= 2
            && self.cover_failures == 0
            && self.tp_le_product
            && self.tp_le_mu_q
            && self.largest_share_bound
    }

    /// The tuple with the largest `F_a`, lowest components first.
    pub fn largest_tuple(&self) -> Option<&TupleRow> {
        self.tuples.iter().rev().max_by_key(|t| t.f_a)
    }
}

pub fn bottleneck_census(z: &Nrobp, g: &Graph, q: Option<usize>, cap: u128) -> Result<BottleneckCensus> {
    check_graph(z, g)?;
    let n = z.num_vars();
    let paths = z.paths(cap)?;
    let masks: Vec<u64> = paths.iter().map(|p| z.positive_mask(p)).collect();
    let mut distinct = masks.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut tp: BTreeMap<Vec<usize>, (Vec<usize>, usize)> = BTreeMap::new();
    let (mut max_multiplicity, mut cover_failures) = (0, 0);
    let (mut min_u, mut max_union) = (usize::MAX, 0);
    for p in &paths {
        let t = characteristic_tuple(z, g, p, q)?;
        max_multiplicity = max_multiplicity.max(t.max_multiplicity);
        cover_failures += usize::from(!t.cover_ok());
        min_u = min_u.min(t.u.len());
        max_union = max_union.max(t.union_size);
        tp.entry(t.components).or_insert((t.u, 0)).1 += 1;
    }
    let q_used = block_sizes(n, q)?.len();
    let sets = node_sets(z, &paths);
    let mut covered = vec![false; distinct.len()];
    let mut containment_failures = 0;
    let mut tuples = Vec::with_capacity(tp.len());
    for (components, (u, owners)) in tp {
        let um = u.iter().fold(0u64, |m, &x| m | 1 << x);
        let mut f_a: Vec<u64> = through_all(&sets, &components).into_iter().map(|i| masks[i]).collect();
        containment_failures += f_a.iter().filter(|&&s| s & um != um).count();
        f_a.sort_unstable();
        f_a.dedup();
        for s in &f_a {
            covered[distinct.binary_search(s).expect("model of F")] = true;
        }
        tuples.push(TupleRow {
            arrow_u: distinct.iter().filter(|&&s| s & um == um).count(),
            f_a: f_a.len(),
            components,
            u,
            owners,
        });
    }
    let mut bottlenecks = vec![Vec::new(); q_used];
    for t in &tuples {
        for (i, &c) in t.components.iter().enumerate() {
            bottlenecks[i].push(c);
        }
    }
    for b in &mut bottlenecks {
        b.sort_unstable();
        b.dedup();
    }
    let mu = bottlenecks.iter().map(Vec::len).max().unwrap_or(0);
    let tp_size = BigUint::from(tuples.len());
    let product: BigUint = bottlenecks.iter().map(|b| BigUint::from(b.len())).product();
    let largest = tuples.iter().map(|t| t.f_a).max().unwrap_or(0);
    Ok(BottleneckCensus {
        n,
        q: q_used,
        paths: paths.len(),
        f_size: distinct.len(),
        covering_identity: covered.iter().all(|&c| c),
        containment_failures,
        max_multiplicity,
        cover_failures,
        min_u: if min_u == usize::MAX { 0 } else { min_u },
        max_union,
        tp_le_product: tp_size <= product,
        tp_le_mu_q: tp_size <= BigUint::from(mu).pow(q_used as u32),
        largest_share_bound: distinct.len() <= largest * tuples.len(),
        mu,
        bottlenecks,
        tuples,
    })
}

/// How models are removed to build an approximant `F ⊂ φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deletion {
    /// Uniformly without replacement.
    Uniform,
    /// From the given models first, then uniformly from the rest.
    Concentrated(ModelSet),
}

/// Keeps `⌊ratio · |F|⌋` models of `f`.
pub fn approximant(f: &ModelSet, ratio: f64, deletion: &Deletion, rng: &mut impl Rng) -> Result<ModelSet> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::invalid(format!("ratio {ratio} outside (0, 1]")));
    }
    let keep = (ratio * f.len() as f64).floor() as usize;
    if keep == 0 {
        return Err(Error::pre("approximant", format!("ratio {ratio} leaves no model of {}", f.len())));
    }
    let drop = f.len() - keep;
    let (focus, rest): (Vec<u64>, Vec<u64>) = match deletion {
        Deletion::Uniform => (Vec::new(), f.packed().to_vec()),
        Deletion::Concentrated(target) => f.packed().iter().partition(|m| target.packed().binary_search(m).is_ok()),
    };
    let mut kept = Vec::with_capacity(keep);
    if drop <= focus.len() {
        let survivors = sample(rng, focus.len(), focus.len() - drop);
        kept.extend(survivors.iter().map(|i| focus[i]));
        kept.extend(rest);
    } else {
        let survivors = sample(rng, rest.len(), keep);
        kept.extend(survivors.iter().map(|i| rest[i]));
    }
    ModelSet::from_packed(f.vars().to_vec(), kept)
}

/// Positive-literal masks (bit `v` for variable `v`) of the models in `f`.
pub fn model_masks(f: &ModelSet) -> Vec<u64> {
    let n = f.vars().len();
    f.packed().iter().map(|&m| from_packed(m, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{phi_of_graph, random_cnf};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(from: usize, to: usize, lit: Option<Lit>) -> NrobpEdge {
        NrobpEdge { from, to, lit }
    }

    fn phi_edge_program() -> Nrobp {
        let f = ModelSet::from_cnf(&phi_of_graph(&Graph::path(2)).unwrap(), 26).unwrap();
        build_order_nrobp(&f, &[0, 1]).unwrap()
    }

    #[test]
    fn parallel_edges_represent_both_values() {
        let z = Nrobp::new(2, 1, 0, 1, vec![e(0, 1, Some(Lit::pos(0))), e(0, 1, Some(Lit::neg(0)))]).unwrap();
        assert!(z.validate().is_valid());
        let f = represented_function(&z, DEFAULT_PATH_CAP).unwrap();
        assert_eq!(f.len(), 2);
        let chain = Nrobp::new(3, 2, 0, 2, vec![e(0, 1, Some(Lit::pos(0))), e(1, 2, Some(Lit::pos(1)))]).unwrap();
        assert_eq!(model_masks(&represented_function(&chain, 10).unwrap()), vec![0b11]);
    }

    #[test]
    fn violations_are_reported() {
        let missing = Nrobp::new(2, 2, 0, 1, vec![e(0, 1, Some(Lit::pos(0)))]).unwrap();
        assert_eq!(
            missing.validate().violations,
            vec![Violation::MissingVariable { var: 1, path: vec![0] }]
        );
        // diamond: one branch reads x, the other y
        let diamond = Nrobp::new(
            4,
            2,
            0,
            3,
            vec![
                e(0, 1, Some(Lit::pos(0))),
                e(0, 1, Some(Lit::pos(1))),
                e(1, 2, None),
                e(2, 3, Some(Lit::pos(1))),
            ],
        )
        .unwrap();
        let v = diamond.validate().violations;
        assert!(matches!(v[0], Violation::MixedVariableSets { node: 1, .. }), "{v:?}");
        let repeated = Nrobp::new(3, 1, 0, 2, vec![e(0, 1, Some(Lit::pos(0))), e(1, 2, Some(Lit::neg(0)))]).unwrap();
        assert!(matches!(repeated.validate().violations[0], Violation::RepeatedVariable { var: 0, .. }));
        let cyclic = Nrobp::new(3, 0, 0, 2, vec![e(0, 1, None), e(1, 2, None), e(2, 1, None)]).unwrap();
        assert!(cyclic.validate().violations.iter().any(|v| matches!(v, Violation::Cycle(c) if c.len() == 2)));
        assert!(matches!(cyclic.layout(), Err(Error::Precondition { .. })));
        let two_sources = Nrobp::new(3, 0, 0, 2, vec![e(0, 2, None), e(1, 2, None)]).unwrap();
        assert_eq!(two_sources.validate().violations, vec![Violation::ExtraSource(1)]);
    }

    #[test]
    fn order_built_edge_program() {
        let z = phi_edge_program();
        assert_eq!(z.num_nodes(), 4);
        assert!(z.validate().is_valid());
        let f = represented_function(&z, 10).unwrap();
        assert_eq!(f.len(), 3);
        let single = ModelSet::from_packed(vec![0, 1, 2], vec![0b101]).unwrap();
        let p = build_order_nrobp(&single, &[2, 0, 1]).unwrap();
        assert_eq!((p.num_nodes(), p.edges().len()), (4, 3));
        assert_eq!(represented_function(&p, 10).unwrap(), single);
        let empty = ModelSet::from_packed(vec![0], vec![]).unwrap();
        assert!(matches!(build_order_nrobp(&empty, &[0]), Err(Error::Precondition { .. })));
    }

    #[test]
    fn text_round_trip() {
        let z = phi_edge_program();
        let back = Nrobp::parse_text(&z.to_text()).unwrap();
        assert_eq!(back.edges(), z.edges());
        assert!(matches!(Nrobp::parse_text("nrobp 2 1 0 1 1\n0 1 +2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Nrobp::parse_text("0 1\n").is_err());
    }

    #[test]
    fn separation_examples() {
        let chain = Nrobp::new(3, 2, 0, 2, vec![e(0, 1, Some(Lit::pos(0))), e(1, 2, Some(Lit::pos(1)))]).unwrap();
        assert_eq!(separates(&chain, 1, &[0], &[1]).unwrap(), Separation::XBeforeY);
        assert_eq!(separates(&chain, 1, &[1], &[0]).unwrap(), Separation::YBeforeX);
        assert!(!separates(&chain, 1, &[0], &[0]).unwrap().holds());
        assert!(!separates(&chain, 1, &[5], &[1]).unwrap().holds());
        assert!(separates(&chain, 7, &[0], &[1]).is_err());
    }

    #[test]
    fn fixed_set_examples() {
        let z = phi_edge_program();
        // node reached by reading x positively
        let u = z.edges().iter().find(|e| e.lit == Some(Lit::pos(0))).unwrap().to;
        let m = Matching::from_pairs([(0, 1)]);
        assert_eq!(fixed_set(&z, u, &m).unwrap(), vec![0]);
        let u_neg = z.edges().iter().find(|e| e.lit == Some(Lit::neg(0))).unwrap().to;
        assert_eq!(fixed_set(&z, u_neg, &m).unwrap(), vec![1]);
        assert_eq!(fixed_set(&z, u, &Matching::new()).unwrap(), Vec::<usize>::new());
        assert!(fixed_set(&z, z.source(), &m).is_err());
        // all four assignments: the middle node sees ¬x before and ¬y after
        let all = ModelSet::from_packed(vec![0, 1], vec![0, 1, 2, 3]).unwrap();
        let z = build_order_nrobp(&all, &[0, 1]).unwrap();
        let err = fixed_set(&z, 1, &m).unwrap_err();
        assert!(matches!(err, Error::Precondition { operation: "fixed_set", .. }), "{err}");
    }

    #[test]
    fn block_size_rule() {
        assert_eq!(block_sizes(4, None).unwrap(), vec![2, 2]);
        assert_eq!(block_sizes(16, None).unwrap(), vec![4; 4]);
        assert_eq!(block_sizes(20, None).unwrap(), vec![5, 5, 10]);
        assert_eq!(block_sizes(10, None).unwrap(), vec![4, 6]);
        assert_eq!(block_sizes(2, None).unwrap(), vec![2]);
        assert_eq!(block_sizes(7, Some(3)).unwrap(), vec![3, 2, 2]);
        assert!(block_sizes(3, Some(4)).is_err());
    }

    fn gk(k: usize, h: u32) -> (Graph, Nrobp) {
        let g = crate::graph::build_gk_instance(k, h).unwrap().graph().clone();
        let f = ModelSet::from_cnf(&phi_of_graph(&g).unwrap(), 26).unwrap();
        let order: Vec<usize> = (0..g.vertex_count()).collect();
        let z = build_order_nrobp(&f, &order).unwrap();
        (g, z)
    }

    #[test]
    fn single_bottleneck_on_small_instance() {
        let (g, z) = gk(8, 0);
        let r = single_bottleneck(&z, &g, DEFAULT_PATH_CAP).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.f_size, represented_function(&z, DEFAULT_PATH_CAP).unwrap().len());
    }

    #[test]
    fn tuples_on_small_instance() {
        let (g, z) = gk(8, 0);
        for p in z.paths(DEFAULT_PATH_CAP).unwrap() {
            let t = characteristic_tuple(&z, &g, &p, Some(2)).unwrap();
            let nodes = z.path_nodes(&p);
            assert!(t.blocks.windows(2).all(|w| w[0].position <= w[1].position));
            let all = z.paths(100).unwrap();
            for q in through_all(&node_sets(&z, &all), &t.components) {
                let mask = z.positive_mask(&all[q]);
                assert_eq!(mask & t.u_mask(), t.u_mask());
            }
            assert!(t.multiplicity_ok() && t.cover_ok());
            assert_eq!(t.components.len(), 2);
            assert!(t.components.iter().all(|c| nodes.contains(c)));
            // one block: the tuple is a single vertex of the path
            let one = characteristic_tuple(&z, &g, &p, Some(1)).unwrap();
            assert_eq!(one.components.len(), 1);
        }
        let c = bottleneck_census(&z, &g, None, DEFAULT_PATH_CAP).unwrap();
        assert!(c.passed(), "{c:?}");
        assert!((c.mu as f64) >= (c.tuples.len() as f64).powf(1.0 / c.q as f64) - 1e-9);
    }

    #[test]
    fn approximants() {
        let (g, z) = gk(8, 1);
        let f = represented_function(&z, DEFAULT_PATH_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let half = approximant(&f, 0.5, &Deletion::Uniform, &mut rng).unwrap();
        assert_eq!(half.len(), f.len() / 2);
        assert!(half.is_subset(&f));
        assert!(approximant(&f, 1e-9, &Deletion::Uniform, &mut rng).is_err());
        assert!(approximant(&f, 1.5, &Deletion::Uniform, &mut rng).is_err());
        let zh = build_order_nrobp(&half, &(0..16).collect::<Vec<_>>()).unwrap();
        let c = bottleneck_census(&zh, &g, None, DEFAULT_PATH_CAP).unwrap();
        assert!(c.passed(), "{c:?}");
        let top = models_through(&zh, &c.largest_tuple().unwrap().components, DEFAULT_PATH_CAP).unwrap();
        let worst = approximant(&f, 0.25, &Deletion::Concentrated(top.clone()), &mut rng).unwrap();
        assert_eq!(worst.len(), f.len() / 4);
        let from_top = worst.packed().iter().filter(|m| top.packed().binary_search(m).is_ok()).count();
        let dropped = f.len() - worst.len();
        assert_eq!(from_top, top.len().saturating_sub(dropped));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn order_built_round_trip(n in 1usize..8, m in 0usize..10, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = ModelSet::from_cnf(&random_cnf(&mut rng, n, m, 3), 26).unwrap();
            prop_assume!(!f.is_empty());
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let z = build_order_nrobp(&f, &order).unwrap();
            prop_assert!(z.validate().is_valid());
            prop_assert_eq!(represented_function(&z, DEFAULT_PATH_CAP).unwrap(), f.clone());
            prop_assert_eq!(z.path_count().unwrap(), f.len() as u128);
            let back = Nrobp::parse_text(&z.to_text()).unwrap();
            prop_assert_eq!(represented_function(&back, DEFAULT_PATH_CAP).unwrap(), f);
            // dropping a labelled edge's literal breaks uniformity
            let mut edges = z.edges().to_vec();
            let i = (seed as usize) % edges.len();
            edges[i].lit = None;
            let broken = Nrobp::new(z.num_nodes(), n, z.source(), z.sink(), edges).unwrap();
            prop_assert!(!broken.validate().is_valid());
        }
    }
}
