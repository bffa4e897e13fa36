use super::{build_product_graph, Graph, ProductGraph, TernaryTree};
use crate::error::{Error, Result};

/// Number of vertices of the path `H` used for parameter `k`: `2 * floor(k / 4)`.
pub fn gk_pattern_len(k: usize) -> usize {
    2 * (k / 4)
}

/// Member of `G_k`: `T(H)` with `T` the complete ternary tree of the given
/// height and `H` a path on `k / 2` vertices. `k` must be a positive multiple
/// of 4.
pub fn build_gk_instance(k: usize, height: u32) -> Result<ProductGraph> {
    if k == 0 || !k.is_multiple_of(4) {
        return Err(Error::invalid(format!(
            "k must be a positive multiple of 4, got {k}"
        )));
    }
    build_product_graph(TernaryTree::new(height), Graph::path(k / 2))
}

/// Like [`build_gk_instance`] but accepts any `k >= 4`, using a path on
/// `2 * floor(k / 4)` vertices.
pub fn build_gk_instance_rounded(k: usize, height: u32) -> Result<ProductGraph> {
    if k < 4 {
        return Err(Error::invalid(format!("k must be at least 4, got {k}")));
    }
    build_product_graph(TernaryTree::new(height), Graph::path(gk_pattern_len(k)))
}
