//! Explicit witnessing matchings on `T(H)` with size guarantees.
//!
//! The recursive constructions work on regions of the tree: a full subtree,
//! or a subtree with one of its proper subtrees removed. Splits of the
//! permutation are expressed as a global cut on permutation positions, so a
//! split chosen deep in the recursion means the same thing at the top.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{tr, ProductGraph, Role, RolePartition, TernaryTree};
use crate::matching::Matching;
use crate::width::{check_permutation, WitnessingMatching};

const UNPLACED: usize = usize::MAX;

/// Nested subtrees `T_1 ⊃ T_2 ⊃ ... ⊃ T_q`, each a largest immediate subtree
/// of its predecessor, with `|OC(T_i, V_i)|` and `|V_i|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeSequence {
    pub roots: Vec<usize>,
    pub occupied: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl SubtreeSequence {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

struct Ctx<'a> {
    pg: &'a ProductGraph,
    in_v: &'a FixedBitSet,
    pos: Vec<usize>,
    p: usize,
    tr_p: u32,
}

impl<'a> Ctx<'a> {
    fn new(pg: &'a ProductGraph, in_v: &'a FixedBitSet, sv: &[usize], p: usize) -> Self {
        let mut pos = vec![UNPLACED; pg.vertex_count()];
        for (i, &x) in sv.iter().enumerate() {
            pos[x] = i;
        }
        Ctx {
            pg,
            in_v,
            pos,
            p,
            tr_p: tr(p as u64),
        }
    }

    fn tree(&self) -> &TernaryTree {
        self.pg.tree()
    }

    fn role(&self, x: usize, cut: usize) -> Role {
        if !self.in_v.contains(x) {
            Role::Outside
        } else if self.pos[x] < cut {
            Role::First
        } else {
            Role::Second
        }
    }

    fn occupied(&self, node: usize) -> bool {
        self.pg.copy(node).any(|x| self.in_v.contains(x))
    }

    /// Positions of `V` inside the listed nodes, ascending.
    fn positions(&self, nodes: &[usize]) -> Vec<usize> {
        let mut ps: Vec<usize> = nodes
            .iter()
            .flat_map(|&n| self.pg.copy(n))
            .filter(|&x| self.in_v.contains(x))
            .map(|x| self.pos[x])
            .collect();
        ps.sort_unstable();
        ps
    }
}

fn region_minus(tree: &TernaryTree, root: usize, removed: usize) -> Vec<usize> {
    let gone = tree.subtree_nodes(removed);
    tree.subtree_nodes(root)
        .into_iter()
        .filter(|n| gone.binary_search(n).is_err())
        .collect()
}

/// Per index `i`, the first edge on the tree path from `u^i` to `v^i` whose
/// ends have different roles.
fn role_path_matching(
    pg: &ProductGraph,
    u: usize,
    v: usize,
    idxs: &[usize],
    role: &dyn Fn(usize) -> Role,
) -> Result<Matching> {
    const OP: &str = "matching_from_role_path";
    let tree = pg.tree();
    if u >= tree.len() || v >= tree.len() {
        return Err(Error::invalid("tree node out of range"));
    }
    let path = tree.path(u, v);
    let mut pairs = Vec::with_capacity(idxs.len());
    let mut seen = vec![false; pg.pattern_len()];
    for &i in idxs {
        if i >= pg.pattern_len() {
            return Err(Error::invalid(format!("pattern index {i} out of range")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::invalid(format!("pattern index {i} repeated")));
        }
        if role(pg.vertex(u, i)) == role(pg.vertex(v, i)) {
            return Err(Error::pre(OP, format!("index {i} has the same role at both ends")));
        }
        let edge = path
            .windows(2)
            .map(|w| (pg.vertex(w[0], i), pg.vertex(w[1], i)))
            .find(|&(a, b)| role(a) != role(b))
            .expect("roles differ at the ends");
        pairs.push(edge);
    }
    Ok(Matching::from_pairs(pairs))
}

/// Path matching between tree nodes `u` and `v` for the given
/// pattern indices.
pub fn matching_from_role_path(
    pg: &ProductGraph,
    u: usize,
    v: usize,
    idxs: &[usize],
    roles: &RolePartition,
) -> Result<Matching> {
    if roles.roles().len() != pg.vertex_count() {
        return Err(Error::invalid("role partition does not match the product graph"));
    }
    role_path_matching(pg, u, v, idxs, &|x| roles.role(x))
}

fn role_changing_edge_in_copy(pg: &ProductGraph, node: usize, role: &dyn Fn(usize) -> Role) -> Option<(usize, usize)> {
    pg.pattern()
        .edges()
        .map(|(i, j)| (pg.vertex(node, i), pg.vertex(node, j)))
        .find(|&(a, b)| role(a) != role(b))
}

/// Matching with role-changing edges inside a fully occupied region.
fn goodpart3_region(
    pg: &ProductGraph,
    region: &[usize],
    p: usize,
    role: &dyn Fn(usize) -> Role,
) -> Result<Matching> {
    const OP: &str = "matching_goodpart3";
    let h = pg.pattern_len();
    if region.len() < p {
        return Err(Error::pre(OP, format!("|V(T)| = {} < p = {p}", region.len())));
    }
    if h < 2 * p {
        return Err(Error::pre(OP, format!("|V(H)| = {h} < 2p = {}", 2 * p)));
    }
    if !pg.pattern().is_connected() {
        return Err(Error::pre(OP, "H is not connected"));
    }
    let (mut n1, mut n2) = (0, 0);
    for &node in region {
        let mut occupied = false;
        for x in pg.copy(node) {
            match role(x) {
                Role::First => n1 += 1,
                Role::Second => n2 += 1,
                Role::Outside => continue,
            }
            occupied = true;
        }
        if !occupied {
            return Err(Error::pre(OP, format!("OC(T, V) != V(T): node {node} is unoccupied")));
        }
    }
    let total = region.len() * h;
    for (name, count) in [("V1", n1), ("V2", n2)] {
        if count + p * p > total {
            return Err(Error::pre(
                OP,
                format!("|{name}| = {count} > |V(T(H))| - p^2 = {}", total as i64 - (p * p) as i64),
            ));
        }
    }

    let homogeneous_role = |node: usize| -> Option<Role> {
        let mut copy = pg.copy(node);
        let r = role(copy.next().expect("non-empty copy"));
        copy.all(|x| role(x) == r).then_some(r)
    };
    let mixed: Vec<usize> = region.iter().copied().filter(|&n| homogeneous_role(n).is_none()).collect();
    if mixed.len() >= p {
        let pairs = mixed
            .iter()
            .map(|&n| role_changing_edge_in_copy(pg, n, role).expect("H connected and copy mixed"));
        return Ok(Matching::from_pairs(pairs));
    }
    let (u, r) = region
        .iter()
        .find_map(|&n| homogeneous_role(n).map(|r| (n, r)))
        .ok_or_else(|| Error::internal(OP, "no homogeneous node although fewer than p are mixed"))?;
    let all: Vec<usize> = (0..h).collect();
    if let Some(&w) = region
        .iter()
        .find(|&&n| homogeneous_role(n).is_some_and(|s| s != r))
    {
        return role_path_matching(pg, u, w, &all, role);
    }
    for &w in region {
        let idxs: Vec<usize> = (0..h).filter(|&i| role(pg.vertex(w, i)) != r).collect();
        if idxs.len() >= p {
            return role_path_matching(pg, u, w, &idxs, role);
        }
    }
    Err(Error::internal(OP, "no node with p vertices outside the dominant role"))
}

/// Matching of size at least `p` whose edges join vertices of different roles
/// with respect to `V1`, `V2` (and the outside of `V = V1 ∪ V2`).
pub fn matching_goodpart3(
    pg: &ProductGraph,
    v1: &FixedBitSet,
    v2: &FixedBitSet,
    p: usize,
) -> Result<Matching> {
    let roles = RolePartition::new(pg.vertex_count(), v1, v2)?;
    let region: Vec<usize> = (0..pg.tree().len()).collect();
    goodpart3_region(pg, &region, p, &|x| roles.role(x))
}

fn goodpart1_region(pg: &ProductGraph, region: &[usize], p: usize, in_v: &FixedBitSet) -> Result<Matching> {
    const OP: &str = "matching_goodpart1";
    let h = pg.pattern_len();
    if !pg.pattern().is_connected() {
        return Err(Error::pre(OP, "H is not connected"));
    }
    if h < p {
        return Err(Error::pre(OP, format!("|V(H)| = {h} < p = {p}")));
    }
    let hits = |n: usize| pg.copy(n).filter(|&x| in_v.contains(x)).count();
    let occupied: Vec<usize> = region.iter().copied().filter(|&n| hits(n) > 0).collect();
    if occupied.len() < p {
        return Err(Error::pre(OP, format!("|OC(T, V)| = {} < p = {p}", occupied.len())));
    }
    let Some(&empty) = region.iter().find(|&&n| hits(n) == 0) else {
        return Err(Error::pre(OP, "every node is occupied"));
    };
    let role = |x: usize| if in_v.contains(x) { Role::First } else { Role::Outside };
    match occupied.iter().find(|&&n| hits(n) == h) {
        None => {
            let pairs = occupied
                .iter()
                .map(|&n| role_changing_edge_in_copy(pg, n, &role).expect("H connected and copy mixed"));
            Ok(Matching::from_pairs(pairs))
        }
        Some(&full) => {
            let all: Vec<usize> = (0..h).collect();
            role_path_matching(pg, full, empty, &all, &role)
        }
    }
}

/// Matching of size at least `p` with every edge joining `V` to its
/// complement, for `V` that leaves some tree node unoccupied.
pub fn matching_goodpart1(pg: &ProductGraph, v: &FixedBitSet, p: usize) -> Result<Matching> {
    let region: Vec<usize> = (0..pg.tree().len()).collect();
    goodpart1_region(pg, &region, p, v)
}

fn cut_from_positions(prefix: &[usize]) -> usize {
    prefix.last().map_or(0, |&last| last + 1)
}

fn perfpart_rec(ctx: &Ctx, root: usize) -> Result<(Matching, usize)> {
    const OP: &str = "perfpart_witness";
    let tree = ctx.tree();
    let height = tree.subtree_height(root);
    let sub = tree.subtree_nodes(root);
    let (matching, cut) = if height <= ctx.tr_p + 1 {
        let ps = ctx.positions(&sub);
        let t = ps.len().div_ceil(2);
        let cut = cut_from_positions(&ps[..t]);
        let m = goodpart3_region(ctx.pg, &sub, ctx.p, &|x| ctx.role(x, cut))?;
        (m, cut)
    } else {
        let children = tree.children(root).expect("internal node");
        let mut parts = Vec::with_capacity(3);
        for c in children {
            let (m, cut) = perfpart_rec(ctx, c)?;
            parts.push((cut, c, m));
        }
        parts.sort_by_key(|&(cut, c, _)| (cut, c));
        let (cut, middle, m_mid) = parts.swap_remove(1);
        let rest = region_minus(tree, root, middle);
        let m_star = goodpart3_region(ctx.pg, &rest, ctx.p, &|x| ctx.role(x, cut))?;
        (m_mid.union(&m_star), cut)
    };
    let total = sub.len() * ctx.pg.pattern_len();
    let ps = ctx.positions(&sub);
    let first = ps.partition_point(|&q| q < cut);
    let p2 = ctx.p * ctx.p;
    if total < first + p2 || total < (ps.len() - first) + p2 {
        return Err(Error::internal(
            OP,
            format!("unbalanced split at node {root}: |SV1| = {first}, |SV2| = {}", ps.len() - first),
        ));
    }
    let need = ctx.p * (height - ctx.tr_p) as usize;
    if matching.len() < need {
        return Err(Error::internal(
            OP,
            format!("matching of size {} at node {root}, need {need}", matching.len()),
        ));
    }
    Ok((matching, cut))
}

fn check_common(op: &'static str, pg: &ProductGraph, v: &FixedBitSet, sv: &[usize], p: usize) -> Result<()> {
    check_permutation(pg.vertex_count(), v, sv)?;
    if p == 0 {
        return Err(Error::pre(op, "p must be at least 1"));
    }
    if !pg.pattern().is_connected() {
        return Err(Error::pre(op, "H is not connected"));
    }
    if pg.pattern_len() < 2 * p {
        return Err(Error::pre(op, format!("|V(H)| = {} < 2p = {}", pg.pattern_len(), 2 * p)));
    }
    Ok(())
}

/// Witnessing matching of size at least `p * (tr(|T|) - tr(p))` for a `V`
/// that occupies every tree node, with a split leaving at least `p^2`
/// vertices of `T(H)` outside each side.
pub fn perfpart_witness(pg: &ProductGraph, v: &FixedBitSet, sv: &[usize], p: usize) -> Result<WitnessingMatching> {
    const OP: &str = "perfpart_witness";
    check_common(OP, pg, v, sv, p)?;
    if pg.tree().len() < p {
        return Err(Error::pre(OP, format!("|V(T)| = {} < p = {p}", pg.tree().len())));
    }
    let ctx = Ctx::new(pg, v, sv, p);
    if let Some(n) = (0..pg.tree().len()).find(|&n| !ctx.occupied(n)) {
        return Err(Error::pre(OP, format!("OC(T, V) != V(T): node {n} is unoccupied")));
    }
    let (matching, split) = perfpart_rec(&ctx, pg.tree().root())?;
    Ok(WitnessingMatching { matching, split })
}

fn subtree_occupancy(ctx: &Ctx) -> Vec<usize> {
    let tree = ctx.tree();
    let mut occ = vec![0; tree.len()];
    for node in (0..tree.len()).rev() {
        occ[node] = usize::from(ctx.occupied(node))
            + tree.children(node).map_or(0, |cs| cs.iter().map(|&c| occ[c]).sum());
    }
    occ
}

fn sequence_from(ctx: &Ctx, occ: &[usize], root: usize) -> SubtreeSequence {
    let tree = ctx.tree();
    let count_v = |n: usize| -> usize {
        tree.subtree_nodes(n)
            .iter()
            .map(|&m| ctx.pg.copy(m).filter(|&x| ctx.in_v.contains(x)).count())
            .sum()
    };
    let mut seq = SubtreeSequence {
        roots: vec![root],
        occupied: vec![occ[root]],
        vertices: vec![count_v(root)],
    };
    let mut cur = root;
    while occ[root] - occ[cur] < ctx.p {
        let Some(cs) = tree.children(cur) else { break };
        // lowest child index wins ties
        let next = cs.iter().copied().fold(cs[0], |b, c| if occ[c] > occ[b] { c } else { b });
        seq.roots.push(next);
        seq.occupied.push(occ[next]);
        seq.vertices.push(count_v(next));
        cur = next;
    }
    seq
}

/// The minimal sequence of largest subtrees lacking `p`: stops at the first
/// `T_q` whose occupancy is at least `p` below that of the whole tree.
pub fn minimal_largest_subtree_sequence(pg: &ProductGraph, v: &FixedBitSet, p: usize) -> Result<SubtreeSequence> {
    const OP: &str = "minimal_largest_subtree_sequence";
    let ctx = Ctx::new(pg, v, &[], p);
    let occ = subtree_occupancy(&ctx);
    let root = pg.tree().root();
    if occ[root] <= p {
        return Err(Error::pre(OP, format!("|OC(T, V)| = {} is not above p = {p}", occ[root])));
    }
    Ok(sequence_from(&ctx, &occ, root))
}

fn mwmain_rec(ctx: &Ctx, occ: &[usize], root: usize) -> Result<(Matching, usize)> {
    const OP: &str = "mwmain_witness";
    let tree = ctx.tree();
    let oc = occ[root];
    let x = tr(oc as u64);
    if x < ctx.tr_p + 2 {
        return Ok((Matching::new(), 0));
    }
    let sub = tree.subtree_nodes(root);
    let (matching, cut) = if oc == sub.len() {
        perfpart_rec(ctx, root)?
    } else if x - ctx.tr_p < 4 {
        (goodpart1_region(ctx.pg, &sub, ctx.p, ctx.in_v)?, 0)
    } else {
        let seq = sequence_from(ctx, occ, root);
        let q = *seq.roots.last().expect("non-empty sequence");
        let (m_q, cut) = mwmain_rec(ctx, occ, q)?;
        let rest = region_minus(tree, root, q);
        let m_rest = goodpart1_region(ctx.pg, &rest, ctx.p, ctx.in_v)?;
        (m_q.union(&m_rest), cut)
    };
    let need = ctx.p * ((x - ctx.tr_p) / 2) as usize;
    if matching.len() < need {
        return Err(Error::internal(
            OP,
            format!("matching of size {} at node {root}, need {need}", matching.len()),
        ));
    }
    Ok((matching, cut))
}

/// Witnessing matching of size at least `p * floor((tr(|OC(T, V)|) - tr(p)) / 2)`.
pub fn mwmain_witness(pg: &ProductGraph, v: &FixedBitSet, sv: &[usize], p: usize) -> Result<WitnessingMatching> {
    const OP: &str = "mwmain_witness";
    check_common(OP, pg, v, sv, p)?;
    let ctx = Ctx::new(pg, v, sv, p);
    let occ = subtree_occupancy(&ctx);
    let root = pg.tree().root();
    if occ[root] < p {
        return Err(Error::pre(OP, format!("|OC(T, V)| = {} < p = {p}", occ[root])));
    }
    let (matching, split) = mwmain_rec(&ctx, &occ, root)?;
    Ok(WitnessingMatching { matching, split })
}

/// The lower bound `p * floor((tr(|OC|) - tr(p)) / 2)`, zero when negative.
pub fn mwmain_bound(occupied: usize, p: usize) -> usize {
    if occupied == 0 {
        return 0;
    }
    let (x, t) = (tr(occupied as u64), tr(p as u64));
    p * (x.saturating_sub(t) / 2) as usize
}

/// The lower bound `p * (tr(|T|) - tr(p))`, zero when negative.
pub fn perfpart_bound(tree_len: usize, p: usize) -> usize {
    p * tr(tree_len as u64).saturating_sub(tr(p as u64)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_gk_instance, build_product_graph, occupied_set, Graph};
    use crate::oracle;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, items: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        items.into_iter().for_each(|i| s.insert(i));
        s
    }

    fn full(pg: &ProductGraph) -> FixedBitSet {
        set(pg.vertex_count(), 0..pg.vertex_count())
    }

    #[test]
    fn role_path_examples() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(2)).unwrap();
        let n = pg.vertex_count();
        let roles = RolePartition::new(n, &set(n, [pg.vertex(0, 0)]), &set(n, [pg.vertex(1, 0)])).unwrap();
        let m = matching_from_role_path(&pg, 0, 1, &[0], &roles).unwrap();
        assert_eq!(m.pairs(), &[(pg.vertex(0, 0), pg.vertex(1, 0))]);
        assert!(matching_from_role_path(&pg, 0, 1, &[], &roles).unwrap().is_empty());
        assert!(matches!(
            matching_from_role_path(&pg, 0, 1, &[1], &roles),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn role_path_uses_every_index() {
        let pg = build_gk_instance(8, 2).unwrap();
        let n = pg.vertex_count();
        // root copy in V1, deepest leaf copy outside, noise in between
        let v1 = set(n, pg.copy(0).chain([pg.vertex(1, 2), pg.vertex(4, 0)]));
        let v2 = set(n, [pg.vertex(1, 0), pg.vertex(1, 3)]);
        let roles = RolePartition::new(n, &v1, &v2).unwrap();
        let m = matching_from_role_path(&pg, 0, 12, &[0, 1, 2, 3], &roles).unwrap();
        assert_eq!(m.len(), 4);
        oracle::check_role_matching(pg.graph(), roles.roles(), m.pairs()).unwrap();
    }

    #[test]
    fn goodpart3_all_mixed() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(4)).unwrap();
        let n = pg.vertex_count();
        let v1 = set(n, (0..4).map(|t| pg.vertex(t, 0)));
        let v2 = set(n, (0..4).map(|t| pg.vertex(t, 1)));
        let m = matching_goodpart3(&pg, &v1, &v2, 2).unwrap();
        assert_eq!(m.len(), 4);
        let roles = RolePartition::new(n, &v1, &v2).unwrap();
        oracle::check_role_matching(pg.graph(), roles.roles(), m.pairs()).unwrap();
    }

    #[test]
    fn goodpart3_rejects_unbalanced() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(4)).unwrap();
        let n = pg.vertex_count();
        let all = full(&pg);
        let err = matching_goodpart3(&pg, &all, &set(n, []), 1).unwrap_err();
        assert!(matches!(err, Error::Precondition { clause, .. } if clause.contains("|V1|")));
        let v1 = set(n, pg.copy(0));
        assert!(matching_goodpart3(&pg, &v1, &set(n, []), 1).is_err());
    }

    #[test]
    fn goodpart1_cases() {
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(2)).unwrap();
        let n = pg.vertex_count();
        // incomplete occupied nodes only
        let v = set(n, [pg.vertex(0, 0), pg.vertex(1, 1), pg.vertex(2, 0)]);
        let m = matching_goodpart1(&pg, &v, 2).unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.pairs().iter().all(|&(a, b)| pg.node_of(a) == pg.node_of(b)));
        // a complete node and an empty node
        let v = set(n, pg.copy(1).chain([pg.vertex(2, 1)]));
        let m = matching_goodpart1(&pg, &v, 2).unwrap();
        assert_eq!(m.len(), 2);
        for &(a, b) in m.pairs() {
            assert!(v.contains(a) != v.contains(b));
        }
        assert!(matching_goodpart1(&pg, &full(&pg), 1).is_err());
    }

    #[test]
    fn perfpart_height_two() {
        let pg = build_product_graph(TernaryTree::new(2), Graph::path(2)).unwrap();
        let v = full(&pg);
        let sv: Vec<usize> = (0..pg.vertex_count()).collect();
        let w = perfpart_witness(&pg, &v, &sv, 1).unwrap();
        assert!(w.len() >= 2);
        let in_v: Vec<bool> = (0..pg.vertex_count()).map(|x| v.contains(x)).collect();
        oracle::check_witnessing(pg.graph(), &in_v, &sv, w.split, w.matching.pairs()).unwrap();
    }

    #[test]
    fn perfpart_base_case() {
        let pg = build_gk_instance(8, 1).unwrap();
        let v = full(&pg);
        let sv: Vec<usize> = (0..pg.vertex_count()).rev().collect();
        let w = perfpart_witness(&pg, &v, &sv, 2).unwrap();
        assert!(w.len() >= 2);
        assert_eq!(w.split, 8);
    }

    #[test]
    fn mwmain_small_instances() {
        let pg = build_product_graph(TernaryTree::new(2), Graph::path(2)).unwrap();
        let v = full(&pg);
        let sv: Vec<usize> = (0..pg.vertex_count()).collect();
        assert!(mwmain_witness(&pg, &v, &sv, 1).unwrap().len() >= 1);
        // x - tr(p) < 2 gives the trivial bound
        let pg = build_product_graph(TernaryTree::new(1), Graph::path(2)).unwrap();
        let v = set(pg.vertex_count(), [0, 2]);
        let w = mwmain_witness(&pg, &v, &[0, 2], 1).unwrap();
        assert!(w.is_empty());
        assert!(mwmain_witness(&pg, &set(pg.vertex_count(), []), &[], 1).is_err());
    }

    #[test]
    fn sequence_examples() {
        let pg = build_product_graph(TernaryTree::new(2), Graph::path(2)).unwrap();
        let v = full(&pg);
        let seq = minimal_largest_subtree_sequence(&pg, &v, 1).unwrap();
        assert_eq!(seq.roots, vec![0, 1]);
        assert_eq!(seq.occupied, vec![13, 4]);
        assert_eq!(seq.vertices, vec![26, 8]);
        assert!(minimal_largest_subtree_sequence(&pg, &set(26, [0]), 1).is_err());
    }

    fn random_instance(k: usize, height: u32, seed: u64) -> (ProductGraph, FixedBitSet, Vec<usize>) {
        let pg = build_gk_instance(k, height).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let density: f64 = rng.gen_range(0.05..1.0);
        let mut v = FixedBitSet::with_capacity(pg.vertex_count());
        for x in 0..pg.vertex_count() {
            if rng.gen_bool(density) {
                v.insert(x);
            }
        }
        let mut sv: Vec<usize> = v.ones().collect();
        sv.shuffle(&mut rng);
        (pg, v, sv)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sequence_properties(height in 1u32..4, seed in any::<u64>(), p in 1usize..3) {
            let (pg, v, _) = random_instance(8, height, seed);
            let occ = occupied_set(&pg, &v);
            prop_assume!(occ.occupied.len() > p);
            let seq = minimal_largest_subtree_sequence(&pg, &v, p).unwrap();
            let q = seq.len();
            prop_assert!(seq.occupied[0] - seq.occupied[q - 1] >= p);
            prop_assert!(seq.occupied[0] - seq.occupied[q - 2] < p);
            prop_assert!(3 * seq.occupied[q - 1] + p >= seq.occupied[0]);
            if occ.occupied.len() < pg.tree().len() {
                let rest = region_minus(pg.tree(), 0, seq.roots[q - 1]);
                prop_assert!(rest.iter().any(|n| !occ.occupied.contains(n)));
            }
        }

        #[test]
        fn mwmain_meets_bound(k in prop_oneof![Just(4usize), Just(8)], height in 0u32..4, seed in any::<u64>()) {
            let (pg, v, sv) = random_instance(k, height, seed);
            let p = k / 4;
            let occ = occupied_set(&pg, &v).occupied.len();
            prop_assume!(occ >= p);
            let w = mwmain_witness(&pg, &v, &sv, p).unwrap();
            prop_assert!(w.len() >= mwmain_bound(occ, p));
            let in_v: Vec<bool> = (0..pg.vertex_count()).map(|x| v.contains(x)).collect();
            prop_assert!(oracle::check_witnessing(pg.graph(), &in_v, &sv, w.split, w.matching.pairs()).is_ok());
        }

        #[test]
        fn goodpart3_random_splits(height in 0u32..3, seed in any::<u64>()) {
            let pg = build_gk_instance(8, height).unwrap();
            let n = pg.vertex_count();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let roles: Vec<Role> = (0..n)
                .map(|_| match rng.gen_range(0..3) { 0 => Role::First, 1 => Role::Second, _ => Role::Outside })
                .collect();
            let v1 = set(n, (0..n).filter(|&x| roles[x] == Role::First));
            let v2 = set(n, (0..n).filter(|&x| roles[x] == Role::Second));
            match matching_goodpart3(&pg, &v1, &v2, 2) {
                Ok(m) => {
                    prop_assert!(m.len() >= 2);
                    prop_assert!(oracle::check_role_matching(pg.graph(), &roles, m.pairs()).is_ok());
                }
                Err(e) => prop_assert!(matches!(e, Error::Precondition { .. }), "{e}"),
            }
        }
    }
}
