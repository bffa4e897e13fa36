//! Criterion benchmarks for `matchwidth-core`; see `benches/core.rs`.
