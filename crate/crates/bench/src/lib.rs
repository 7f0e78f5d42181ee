//! Criterion benchmarks for the smallcover crate; see `benches/`.
