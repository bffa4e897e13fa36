use std::collections::HashSet;

use super::Graph;

const MAX_CATALOG_VERTICES: usize = 10;

fn pair_index(i: usize, j: usize) -> usize {
    // i < j; row-major upper triangle
    j * (j - 1) / 2 + i
}

fn code_under(masks: &[u64], order: &[usize]) -> u64 {
    let mut code = 0u64;
    for j in 1..order.len() {
        let row = masks[order[j]];
        for i in 0..j {
            if row >> order[i] & 1 == 1 {
                code |= 1 << pair_index(i, j);
            }
        }
    }
    code
}

/// Colour refinement: returns vertices grouped into ordered cells whose order
/// depends only on the isomorphism class.
fn refined_cells(masks: &[u64]) -> Vec<Vec<usize>> {
    let n = masks.len();
    let mut colour: Vec<usize> = masks.iter().map(|m| m.count_ones() as usize).collect();
    let mut classes = 0;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut ns: Vec<usize> = (0..n)
                    .filter(|&w| masks[v] >> w & 1 == 1)
                    .map(|w| colour[w])
                    .collect();
                ns.sort_unstable();
                (colour[v], ns)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        colour = sigs
            .iter()
            .map(|s| distinct.binary_search(s).expect("signature present"))
            .collect();
        if distinct.len() == classes {
            break;
        }
        classes = distinct.len();
    }
    let mut cells = vec![Vec::new(); classes];
    for v in 0..n {
        cells[colour[v]].push(v);
    }
    cells
}

/// A canonical labelling code: two graphs on the same number of vertices get
/// equal codes iff they are isomorphic. Supports up to 10 vertices.
pub fn canonical_code(g: &Graph) -> u64 {
    assert!(g.vertex_count() <= MAX_CATALOG_VERTICES);
    let masks = g.neighbor_masks().expect("small graph");
    let cells = refined_cells(&masks);
    let mut order = Vec::with_capacity(masks.len());
    let mut best = u64::MAX;
    permute_cells(&masks, &cells, 0, &mut order, &mut best);
    best
}

fn permute_cells(masks: &[u64], cells: &[Vec<usize>], cell: usize, order: &mut Vec<usize>, best: &mut u64) {
    if cell == cells.len() {
        *best = (*best).min(code_under(masks, order));
        return;
    }
    let mut items = cells[cell].clone();
    heap_permutations(&mut items, &mut |perm| {
        let base = order.len();
        order.extend_from_slice(perm);
        permute_cells(masks, cells, cell + 1, order, best);
        order.truncate(base);
    });
}

fn heap_permutations(items: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
    // iterative Heap's algorithm
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn graph_from_code(n: usize, code: u64) -> Graph {
    let mut g = Graph::new(n);
    for j in 1..n {
        for i in 0..j {
            if code >> pair_index(i, j) & 1 == 1 {
                g.add_edge(i, j).expect("valid pair");
            }
        }
    }
    g
}

/// One representative of every isomorphism class of graphs on exactly `n`
/// vertices, in increasing order of canonical code.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= MAX_CATALOG_VERTICES, "catalog supports at most {MAX_CATALOG_VERTICES} vertices");
    if n == 0 {
        return vec![Graph::new(0)];
    }
    let mut level = vec![Graph::new(1)];
    for size in 2..=n {
        let mut codes = HashSet::new();
        for g in &level {
            for mask in 0u64..(1 << (size - 1)) {
                let mut h = g.clone();
                h.adj.push(Vec::new());
                for w in 0..size - 1 {
                    if mask >> w & 1 == 1 {
                        h.add_edge(w, size - 1).expect("valid edge");
                    }
                }
                codes.insert(canonical_code(&h));
            }
        }
        let mut codes: Vec<u64> = codes.into_iter().collect();
        codes.sort_unstable();
        level = codes.into_iter().map(|c| graph_from_code(size, c)).collect();
    }
    level
}
