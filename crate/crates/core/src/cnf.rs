//! Literal sets, CNFs, explicit model sets and brute-force counting.
//!
//! Variables are `0..n`. In text formats they are written 1-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{build_gk_instance, Graph, ProductGraph};

/// Default bound on the number of variables for exhaustive counting.
pub const DEFAULT_MODEL_CAP: usize = 26;

/// Hard limit for explicit model sets, which pack an assignment into a `u64`.
pub const MAX_MODEL_VARS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { '+' } else { '-' };
        write!(f, "{sign}{}", self.var + 1)
    }
}

/// A consistent set of literals: a partial assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiteralSet {
    lits: BTreeMap<usize, bool>,
}

impl LiteralSet {
    pub fn new() -> Self {
        LiteralSet::default()
    }

    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Result<Self> {
        let mut s = LiteralSet::new();
        for l in lits {
            s.insert(l)?;
        }
        Ok(s)
    }

    /// All of `vars` set to true.
    pub fn positive(vars: impl IntoIterator<Item = usize>) -> Self {
        LiteralSet {
            lits: vars.into_iter().map(|v| (v, true)).collect(),
        }
    }

    /// Adds `l`; fails if the opposite literal is present.
    pub fn insert(&mut self, l: Lit) -> Result<()> {
        match self.lits.insert(l.var, l.positive) {
            Some(old) if old != l.positive => {
                self.lits.insert(l.var, old);
                Err(Error::invalid(format!("variable {} occurs with both polarities", l.var + 1)))
            }
            _ => Ok(()),
        }
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        self.lits.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.lits.keys().copied()
    }

    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().map(|(&var, &positive)| Lit { var, positive })
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.get(l.var) == Some(l.positive)
    }

    pub fn is_subset(&self, other: &LiteralSet) -> bool {
        self.lits().all(|l| other.contains(l))
    }

    /// The literals of `self` on `vars`. Every var must be assigned.
    pub fn project(&self, vars: &[usize]) -> Result<LiteralSet> {
        let mut out = LiteralSet::new();
        for &v in vars {
            let positive = self
                .get(v)
                .ok_or_else(|| Error::invalid(format!("variable {} is not in Var(S)", v + 1)))?;
            out.lits.insert(v, positive);
        }
        Ok(out)
    }

    pub fn union(&self, other: &LiteralSet) -> Result<LiteralSet> {
        let mut out = self.clone();
        for l in other.lits() {
            out.insert(l)?;
        }
        Ok(out)
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.lits() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A CNF over variables `0..num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        for c in &clauses {
            if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
                return Err(Error::invalid(format!(
                    "clause variable {} beyond the {num_vars} declared",
                    l.var + 1
                )));
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Graph on the variables with an edge for every pair sharing a clause.
    pub fn primal_graph(&self) -> Graph {
        let mut g = Graph::new(self.num_vars);
        for c in &self.clauses {
            for (i, a) in c.iter().enumerate() {
                for b in &c[i + 1..] {
                    if a.var != b.var {
                        g.add_edge(a.var, b.var).expect("variables in range");
                    }
                }
            }
        }
        g
    }

    /// Every clause is `(u ∨ v)` with two distinct positive literals.
    pub fn is_monotone_2cnf(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| c.len() == 2 && c[0].positive && c[1].positive && c[0].var != c[1].var)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                out.push_str(&format!("{} ", if l.positive { v } else { -v }));
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            last_line = ln;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if header.is_some() {
                    return Err(Error::parse(ln, "duplicate problem line"));
                }
                let [_, "cnf", n, m] = parts[..] else {
                    return Err(Error::parse(ln, "problem line must be `p cnf <vars> <clauses>`"));
                };
                let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad number `{s}`")));
                header = Some((parse(n)?, parse(m)?));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(Error::parse(ln, "clause before the problem line"));
            };
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(ln, format!("bad literal `{tok}`")))?;
                if v == 0 {
                    clauses.push(std::mem::take(&mut current));
                    continue;
                }
                let var = v.unsigned_abs() as usize;
                if var > n {
                    return Err(Error::parse(ln, format!("variable {var} beyond the {n} declared")));
                }
                current.push(Lit {
                    var: var - 1,
                    positive: v > 0,
                });
            }
        }
        let (n, m) = header.ok_or_else(|| Error::parse(1, "missing problem line"))?;
        if !current.is_empty() {
            return Err(Error::parse(last_line, "last clause is not terminated by 0"));
        }
        if clauses.len() != m {
            return Err(Error::parse(
                last_line,
                format!("problem line declares {m} clauses, found {}", clauses.len()),
            ));
        }
        Cnf::new(n, clauses)
    }
}

/// `φ(G)`: one clause `(u ∨ v)` per edge.
pub fn phi_of_graph(g: &Graph) -> Result<Cnf> {
    if let Some(&v) = g.isolated_vertices().first() {
        return Err(Error::invalid(format!("vertex {v} is isolated")));
    }
    let clauses = g.edges().map(|(u, v)| vec![Lit::pos(u), Lit::pos(v)]).collect();
    Cnf::new(g.vertex_count(), clauses)
}

/// `Φ_k` together with the graph it came from.
#[derive(Clone, Debug)]
pub struct PhiK {
    pub k: usize,
    pub height: u32,
    pub graph: ProductGraph,
    pub cnf: Cnf,
    /// The largest `c1` with `|V(G)| >= k^(2 c1)`.
    pub size_exponent: f64,
}

pub fn build_phi_k(k: usize, height: u32) -> Result<PhiK> {
    let graph = build_gk_instance(k, height)?;
    let cnf = phi_of_graph(graph.graph())?;
    let n = graph.vertex_count() as f64;
    Ok(PhiK {
        k,
        height,
        size_exponent: n.ln() / (2.0 * (k as f64).ln()),
        graph,
        cnf,
    })
}

struct PackedClause {
    pos: u64,
    neg: u64,
    last: usize,
}

fn packed(cnf: &Cnf) -> Vec<PackedClause> {
    cnf.clauses
        .iter()
        .map(|c| PackedClause {
            pos: c.iter().filter(|l| l.positive).fold(0, |m, l| m | 1 << l.var),
            neg: c.iter().filter(|l| !l.positive).fold(0, |m, l| m | 1 << l.var),
            last: c.iter().map(|l| l.var).max().unwrap_or(0),
        })
        .collect()
}

fn check_cap(cnf: &Cnf, cap: usize) -> Result<()> {
    let n = cnf.num_vars;
    if n > cap.min(MAX_MODEL_VARS) {
        return Err(Error::cap("variables for exhaustive counting", n as u128, cap.min(MAX_MODEL_VARS) as u128));
    }
    Ok(())
}

fn fixed_masks(n: usize, fixed: &LiteralSet) -> Result<(u64, u64)> {
    let (mut t, mut f) = (0u64, 0u64);
    for l in fixed.lits() {
        if l.var >= n {
            return Err(Error::invalid(format!("variable {} is not a variable of F", l.var + 1)));
        }
        if l.positive {
            t |= 1 << l.var
        } else {
            f |= 1 << l.var
        }
    }
    Ok((t, f))
}

/// Depth-first enumeration of assignments in increasing variable order,
/// abandoning a branch once a clause is falsified. `on_free` receives the
/// partial assignment when every clause is satisfied before all variables are
/// set.
struct Search<'a> {
    n: usize,
    clauses: &'a [PackedClause],
    fixed_true: u64,
    fixed_false: u64,
}

impl Search<'_> {
    fn run(&self, depth: usize, truth: u64, active: &[u32], visit: &mut dyn FnMut(u64, usize)) {
        if active.is_empty() || depth == self.n {
            if active.is_empty() {
                visit(truth, depth);
            }
            return;
        }
        let bit = 1u64 << depth;
        for value in [false, true] {
            if (value && self.fixed_false & bit != 0) || (!value && self.fixed_true & bit != 0) {
                continue;
            }
            let truth = if value { truth | bit } else { truth };
            let mut next = Vec::with_capacity(active.len());
            let mut conflict = false;
            for &ci in active {
                let c = &self.clauses[ci as usize];
                let sat = if value { c.pos & bit != 0 } else { c.neg & bit != 0 };
                if sat {
                    continue;
                }
                if c.last <= depth {
                    conflict = true;
                    break;
                }
                next.push(ci);
            }
            if !conflict {
                self.run(depth + 1, truth, &next, visit);
            }
        }
    }
}

fn search(cnf: &Cnf, fixed: &LiteralSet, visit: &mut dyn FnMut(u64, usize)) -> Result<()> {
    let clauses = packed(cnf);
    if clauses.iter().any(|c| c.pos | c.neg == 0) {
        return Ok(());
    }
    let (fixed_true, fixed_false) = fixed_masks(cnf.num_vars, fixed)?;
    let s = Search {
        n: cnf.num_vars,
        clauses: &clauses,
        fixed_true,
        fixed_false,
    };
    let active: Vec<u32> = (0..clauses.len() as u32).collect();
    s.run(0, 0, &active, visit);
    Ok(())
}

/// Number of models of `cnf`, by exhaustive backtracking.
pub fn count_models(cnf: &Cnf) -> Result<BigUint> {
    count_models_capped(cnf, DEFAULT_MODEL_CAP, &LiteralSet::new())
}

/// Number of models of `cnf` that contain `fixed`.
pub fn count_models_capped(cnf: &Cnf, cap: usize, fixed: &LiteralSet) -> Result<BigUint> {
    check_cap(cnf, cap)?;
    let n = cnf.num_vars;
    let (fixed_true, fixed_false) = fixed_masks(n, fixed)?;
    let pinned = fixed_true | fixed_false;
    let mut total = BigUint::zero();
    search(cnf, fixed, &mut |_, depth| {
        // variables from `depth` on are free unless pinned by `fixed`
        let free = (depth..n).filter(|&v| pinned >> v & 1 == 0).count();
        total += BigUint::one() << free;
    })?;
    Ok(total)
}

/// A Boolean function given by its models over a sorted variable list.
///
/// A model is packed into a `u64` with `vars[j]` at bit `len - 1 - j`, so the
/// numeric order of models is the lexicographic order of assignments with
/// false before true.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelSet {
    vars: Vec<usize>,
    models: Vec<u64>,
}

impl ModelSet {
    /// From packed models; sorts and deduplicates.
    pub fn from_packed(vars: Vec<usize>, mut models: Vec<u64>) -> Result<Self> {
        if vars.len() > MAX_MODEL_VARS {
            return Err(Error::cap("variables in an explicit model set", vars.len() as u128, MAX_MODEL_VARS as u128));
        }
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("model set variables must be strictly increasing"));
        }
        let width = vars.len();
        if width < 64 && models.iter().any(|&m| m >> width != 0) {
            return Err(Error::invalid("packed model has bits beyond its variables"));
        }
        models.sort_unstable();
        models.dedup();
        Ok(ModelSet { vars, models })
    }

    pub fn from_literal_sets(vars: Vec<usize>, sets: impl IntoIterator<Item = LiteralSet>) -> Result<Self> {
        let mut models = Vec::new();
        let probe = ModelSet {
            vars: vars.clone(),
            models: Vec::new(),
        };
        for s in sets {
            if s.len() != vars.len() || s.vars().any(|v| vars.binary_search(&v).is_err()) {
                return Err(Error::invalid(format!("assignment `{s}` is not total over the variables")));
            }
            models.push(probe.pack(&s));
        }
        ModelSet::from_packed(vars, models)
    }

    /// All models of `cnf`, enumerated exhaustively.
    pub fn from_cnf(cnf: &Cnf, cap: usize) -> Result<Self> {
        check_cap(cnf, cap)?;
        let n = cnf.num_vars;
        let mut raw: Vec<u64> = Vec::new();
        search(cnf, &LiteralSet::new(), &mut |truth, depth| {
            let free: Vec<usize> = (depth..n).collect();
            for combo in 0u64..(1 << free.len()) {
                let mut t = truth;
                for (j, &v) in free.iter().enumerate() {
                    if combo >> j & 1 == 1 {
                        t |= 1 << v;
                    }
                }
                raw.push(t);
            }
        })?;
        let vars: Vec<usize> = (0..n).collect();
        let models = raw
            .into_iter()
            .map(|t| (0..n).fold(0u64, |m, v| if t >> v & 1 == 1 { m | 1 << (n - 1 - v) } else { m }))
            .collect();
        ModelSet::from_packed(vars, models)
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn packed(&self) -> &[u64] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    fn bit_of(&self, var: usize) -> Option<u32> {
        self.vars
            .binary_search(&var)
            .ok()
            .map(|j| (self.vars.len() - 1 - j) as u32)
    }

    fn pack(&self, s: &LiteralSet) -> u64 {
        s.lits()
            .filter(|l| l.positive)
            .fold(0, |m, l| m | 1 << self.bit_of(l.var).expect("var in set"))
    }

    fn masks(&self, s: &LiteralSet) -> Result<(u64, u64)> {
        let (mut care, mut value) = (0u64, 0u64);
        for l in s.lits() {
            let b = self
                .bit_of(l.var)
                .ok_or_else(|| Error::invalid(format!("variable {} is not a variable of F", l.var + 1)))?;
            care |= 1 << b;
            if l.positive {
                value |= 1 << b;
            }
        }
        Ok((care, value))
    }

    pub fn unpack(&self, m: u64) -> LiteralSet {
        let n = self.vars.len();
        LiteralSet {
            lits: self
                .vars
                .iter()
                .enumerate()
                .map(|(j, &v)| (v, m >> (n - 1 - j) & 1 == 1))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = LiteralSet> + '_ {
        self.models.iter().map(|&m| self.unpack(m))
    }

    pub fn contains(&self, s: &LiteralSet) -> bool {
        s.len() == self.vars.len()
            && s.vars().all(|v| self.bit_of(v).is_some())
            && self.models.binary_search(&self.pack(s)).is_ok()
    }

    /// `F ← S`: the models containing `S`, over the same variables.
    pub fn arrow(&self, s: &LiteralSet) -> Result<ModelSet> {
        let (care, value) = self.masks(s)?;
        Ok(ModelSet {
            vars: self.vars.clone(),
            models: self.models.iter().copied().filter(|&m| m & care == value).collect(),
        })
    }

    /// `F|_S`: the models containing `S`, with the variables of `S` removed.
    pub fn restrict(&self, s: &LiteralSet) -> Result<ModelSet> {
        let arrowed = self.arrow(s)?;
        let keep: Vec<usize> = self.vars.iter().copied().filter(|&v| s.get(v).is_none()).collect();
        arrowed.project_onto(&keep)
    }

    /// `Proj(F, V)`: the distinct restrictions of models to `vars`.
    pub fn project_onto(&self, vars: &[usize]) -> Result<ModelSet> {
        let mut target: Vec<usize> = vars.to_vec();
        target.sort_unstable();
        target.dedup();
        let bits: Vec<u32> = target
            .iter()
            .map(|&v| {
                self.bit_of(v)
                    .ok_or_else(|| Error::invalid(format!("variable {} is not a variable of F", v + 1)))
            })
            .collect::<Result<_>>()?;
        let k = target.len();
        let models = self
            .models
            .iter()
            .map(|&m| {
                bits.iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &b)| if m >> b & 1 == 1 { acc | 1 << (k - 1 - j) } else { acc })
            })
            .collect();
        ModelSet::from_packed(target, models)
    }

    /// Every model of `self` is a model of `other`, over the same variables.
    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.vars == other.vars && self.models.iter().all(|m| other.models.binary_search(m).is_ok())
    }

    /// Keeps the models accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(u64) -> bool) -> ModelSet {
        ModelSet {
            vars: self.vars.clone(),
            models: self.models.iter().copied().filter(|&m| keep(m)).collect(),
        }
    }

    /// One assignment per line as `±var` tokens, 1-based.
    pub fn to_model_list(&self) -> String {
        let mut out = String::new();
        for s in self.iter() {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_model_list(text: &str) -> Result<Self> {
        let mut vars: Option<Vec<usize>> = None;
        let mut sets = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut s = LiteralSet::new();
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(ln, format!("bad literal `{tok}`")))?;
                if v == 0 {
                    return Err(Error::parse(ln, "variables are 1-based"));
                }
                let l = Lit {
                    var: v.unsigned_abs() as usize - 1,
                    positive: v > 0,
                };
                s.insert(l).map_err(|e| Error::parse(ln, e.to_string()))?;
            }
            let these: Vec<usize> = s.vars().collect();
            match &vars {
                None => vars = Some(these),
                Some(vs) if *vs != these => {
                    return Err(Error::parse(ln, "assignment is over a different variable set"));
                }
                Some(_) => {}
            }
            sets.push(s);
        }
        ModelSet::from_literal_sets(vars.unwrap_or_default(), sets)
    }
}

/// How strongly the extracted subset must be spread out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    /// Pairwise non-adjacent; size at least `|U| / (d + 1)`.
    Independent,
    /// Non-adjacent and without common neighbours; size at least `|U| / (d^2 + 1)`.
    NoCommonNeighbors,
}

/// Greedy subset of `u` (taken in increasing order) meeting `mode`.
pub fn independent_subset(g: &Graph, u: &[usize], mode: SubsetMode) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    let mut blocked = vec![false; n];
    let mut sorted = u.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut chosen = Vec::new();
    for &x in &sorted {
        if x >= n {
            return Err(Error::invalid(format!("vertex {x} out of range")));
        }
        if blocked[x] {
            continue;
        }
        chosen.push(x);
        blocked[x] = true;
        for &y in g.neighbors(x) {
            blocked[y] = true;
            if mode == SubsetMode::NoCommonNeighbors {
                for &z in g.neighbors(y) {
                    blocked[z] = true;
                }
            }
        }
    }
    Ok(chosen)
}

/// A random CNF with `clauses` clauses of 1 to `max_width` distinct variables.
pub fn random_cnf(rng: &mut impl Rng, num_vars: usize, clauses: usize, max_width: usize) -> Cnf {
    let mut out = Vec::with_capacity(clauses);
    for _ in 0..clauses {
        let width = rng.gen_range(1..=max_width.min(num_vars).max(1));
        let mut vars = BTreeSet::new();
        while vars.len() < width {
            vars.insert(rng.gen_range(0..num_vars));
        }
        out.push(
            vars.into_iter()
                .map(|var| Lit {
                    var,
                    positive: rng.gen_bool(0.5),
                })
                .collect(),
        );
    }
    Cnf::new(num_vars, out).expect("variables in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_count(cnf: &Cnf) -> usize {
        (0u64..1 << cnf.num_vars())
            .filter(|t| {
                cnf.clauses()
                    .iter()
                    .all(|c| c.iter().any(|l| (t >> l.var & 1 == 1) == l.positive))
            })
            .count()
    }

    fn triangle() -> Graph {
        Graph::complete(3)
    }

    #[test]
    fn phi_examples() {
        let e = phi_of_graph(&Graph::path(2)).unwrap();
        assert_eq!((e.clauses().len(), count_models(&e).unwrap()), (1, 3u32.into()));
        let p3 = phi_of_graph(&Graph::path(3)).unwrap();
        assert_eq!((p3.clauses().len(), count_models(&p3).unwrap()), (2, 5u32.into()));
        let t = phi_of_graph(&triangle()).unwrap();
        assert_eq!((t.clauses().len(), count_models(&t).unwrap()), (3, 4u32.into()));
        assert!(phi_of_graph(&Graph::new(2)).is_err());
        assert_eq!(t.primal_graph(), triangle());
        assert!(t.is_monotone_2cnf());
    }

    #[test]
    fn empty_cnf_counts_all() {
        let c = Cnf::new(5, vec![]).unwrap();
        assert_eq!(count_models(&c).unwrap(), 32u32.into());
        let c = Cnf::new(3, vec![vec![]]).unwrap();
        assert_eq!(count_models(&c).unwrap(), BigUint::zero());
    }

    #[test]
    fn count_cap() {
        let c = Cnf::new(30, vec![]).unwrap();
        assert!(matches!(count_models(&c), Err(Error::CapExceeded { .. })));
        assert_eq!(count_models_capped(&c, 30, &LiteralSet::new()).unwrap(), BigUint::one() << 30);
    }

    #[test]
    fn phi_k_sizes() {
        let phi = build_phi_k(8, 1).unwrap();
        assert_eq!(phi.cnf.num_vars(), 16);
        assert_eq!(phi.cnf.clauses().len(), 24);
        assert_eq!(phi.cnf.primal_graph(), *phi.graph.graph());
        let phi0 = build_phi_k(8, 0).unwrap();
        assert_eq!(phi0.cnf, phi_of_graph(&Graph::path(4)).unwrap());
        assert!(build_phi_k(6, 1).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = LiteralSet::from_lits([Lit::pos(0), Lit::neg(1)]).unwrap();
        assert_eq!(s.project(&[0]).unwrap(), LiteralSet::positive([0]));
        assert_eq!(s.project(&[0, 1]).unwrap(), s);
        assert!(s.project(&[]).unwrap().is_empty());
        assert!(s.project(&[2]).is_err());
        assert!(LiteralSet::from_lits([Lit::pos(0), Lit::neg(0)]).is_err());
    }

    #[test]
    fn restriction_examples() {
        let f = ModelSet::from_cnf(&phi_of_graph(&Graph::path(2)).unwrap(), 26).unwrap();
        let r = f.restrict(&LiteralSet::positive([0])).unwrap();
        assert_eq!(r.vars(), &[1]);
        assert_eq!(r.len(), 2);
        let r = f.restrict(&LiteralSet::from_lits([Lit::neg(0)]).unwrap()).unwrap();
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![LiteralSet::positive([1])]);
        assert_eq!(f.restrict(&LiteralSet::new()).unwrap(), f);
        assert!(f.restrict(&LiteralSet::positive([4])).is_err());
    }

    #[test]
    fn arrow_examples() {
        let f = ModelSet::from_cnf(&phi_of_graph(&Graph::path(3)).unwrap(), 26).unwrap();
        assert_eq!(f.arrow(&LiteralSet::positive([0, 2])).unwrap().len(), 2);
        assert_eq!(f.arrow(&LiteralSet::new()).unwrap(), f);
        let clash = LiteralSet::from_lits([Lit::neg(0), Lit::neg(1)]).unwrap();
        assert!(f.arrow(&clash).unwrap().is_empty());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let f = ModelSet::from_cnf(&phi_of_graph(&Graph::path(2)).unwrap(), 26).unwrap();
        let text = f.to_model_list();
        assert_eq!(text, "-1 +2\n+1 -2\n+1 +2\n");
        assert_eq!(ModelSet::parse_model_list(&text).unwrap(), f);
        assert!(ModelSet::parse_model_list("+1 -2\n+1\n").is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let c = Cnf::new(3, vec![vec![Lit::pos(0), Lit::neg(2)], vec![Lit::pos(1)]]).unwrap();
        let text = c.to_dimacs();
        assert_eq!(text, "p cnf 3 2\n1 -3 0\n2 0\n");
        assert_eq!(Cnf::parse_dimacs(&text).unwrap(), c);
        assert_eq!(Cnf::parse_dimacs("c hi\np cnf 3 2\n1 -3\n 0 2 0\n").unwrap(), c);
        assert!(Cnf::parse_dimacs("p cnf 2 1\n3 0\n").is_err());
        assert!(Cnf::parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(Cnf::parse_dimacs("1 0\n").is_err());
    }

    #[test]
    fn subset_examples() {
        let e = Graph::path(2);
        assert_eq!(independent_subset(&e, &[0, 1], SubsetMode::Independent).unwrap().len(), 1);
        let g = Graph::path(5);
        assert_eq!(independent_subset(&g, &[0, 2, 4], SubsetMode::Independent).unwrap(), vec![0, 2, 4]);
        assert_eq!(independent_subset(&g, &[0, 2, 4], SubsetMode::NoCommonNeighbors).unwrap(), vec![0, 4]);
        let star = Graph::star(4);
        let all: Vec<usize> = (0..5).collect();
        let s = independent_subset(&star, &all, SubsetMode::Independent).unwrap();
        assert_eq!(s, vec![0]);
        assert!(s.len() * (star.max_degree() + 1) >= all.len());
    }

    fn arb_cnf() -> impl Strategy<Value = Cnf> {
        (1usize..10, 0usize..14, any::<u64>()).prop_map(|(n, m, seed)| {
            random_cnf(&mut ChaCha8Rng::seed_from_u64(seed), n, m, 3)
        })
    }

    proptest! {
        #[test]
        fn counting_matches_truth_table(cnf in arb_cnf()) {
            let brute = brute_count(&cnf);
            prop_assert_eq!(count_models(&cnf).unwrap(), BigUint::from(brute));
            prop_assert_eq!(ModelSet::from_cnf(&cnf, 26).unwrap().len(), brute);
        }

        #[test]
        fn arrow_and_restrict_agree(cnf in arb_cnf(), bits in any::<u16>(), signs in any::<u16>()) {
            let f = ModelSet::from_cnf(&cnf, 26).unwrap();
            let n = cnf.num_vars();
            let s = LiteralSet::from_lits(
                (0..n).filter(|v| bits >> v & 1 == 1).map(|v| Lit { var: v, positive: signs >> v & 1 == 1 }),
            ).unwrap();
            let arrowed = f.arrow(&s).unwrap();
            prop_assert_eq!(arrowed.len(), f.restrict(&s).unwrap().len());
            prop_assert_eq!(BigUint::from(arrowed.len()), count_models_capped(&cnf, 26, &s).unwrap());
            for m in arrowed.iter() {
                prop_assert!(s.is_subset(&m));
            }
            // monotonicity: a larger S keeps fewer models
            let mut bigger = s.clone();
            if let Some(v) = (0..n).find(|&v| s.get(v).is_none()) {
                bigger.insert(Lit::pos(v)).unwrap();
                prop_assert!(f.arrow(&bigger).unwrap().is_subset(&arrowed));
            }
        }

        #[test]
        fn projection_keeps_a_fraction(cnf in arb_cnf(), bits in any::<u16>()) {
            let f = ModelSet::from_cnf(&cnf, 26).unwrap();
            prop_assume!(!f.is_empty());
            let n = cnf.num_vars();
            let dropped = (0..n).filter(|v| bits >> v & 1 == 1).count();
            let kept: Vec<usize> = (0..n).filter(|v| bits >> v & 1 == 0).collect();
            let proj = f.project_onto(&kept).unwrap();
            prop_assert!(proj.len() << dropped >= f.len());
        }
    }
}
