use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use matchwidth_core::{Graph, ProductGraph};

/// Random graph on at most `max_vertices` vertices with degrees capped at
/// `max_degree` and no isolated vertex.
pub fn bounded_graph(rng: &mut ChaCha8Rng, max_vertices: usize, max_degree: usize) -> Graph {
    let n = rng.gen_range(2..=max_vertices.max(2));
    let mut g = Graph::new(n);
    let attempts = rng.gen_range(n / 2..=3 * n);
    for _ in 0..attempts {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !g.has_edge(a, b) && g.degree(a) < max_degree && g.degree(b) < max_degree {
            g.add_edge(a, b).expect("endpoints are in range");
        }
    }
    for v in 0..n {
        if g.degree(v) == 0 {
            let mut partners: Vec<usize> = (0..n).filter(|&w| w != v && g.degree(w) < max_degree).collect();
            partners.shuffle(rng);
            if let Some(&w) = partners.first() {
                g.add_edge(v, w).expect("endpoints are in range");
            }
        }
    }
    g
}

/// Random connected graph: a random tree plus up to `n` extra edges.
pub fn connected_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(v, rng.gen_range(0..v)).expect("endpoints are in range");
    }
    for _ in 0..n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !g.has_edge(a, b) {
            g.add_edge(a, b).expect("endpoints are in range");
        }
    }
    g
}

/// Random vertex set of `pg`; with `full_occupancy` every tree node's copy
/// meets the set.
pub fn vertex_set(pg: &ProductGraph, rng: &mut ChaCha8Rng, full_occupancy: bool) -> FixedBitSet {
    let n = pg.vertex_count();
    let density = rng.gen_range(0.05..1.0);
    let mut v = FixedBitSet::with_capacity(n);
    for x in 0..n {
        if rng.gen_bool(density) {
            v.insert(x);
        }
    }
    if full_occupancy {
        for node in 0..pg.tree().len() {
            let copy: Vec<usize> = pg.copy(node).collect();
            v.insert(*copy.choose(rng).expect("copies are nonempty"));
        }
    }
    v
}

/// Identity, reverse and one shuffled order of `0..n`.
pub fn orders(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let rev: Vec<usize> = (0..n).rev().collect();
    let mut shuffled = id.clone();
    shuffled.shuffle(rng);
    vec![id, rev, shuffled]
}
