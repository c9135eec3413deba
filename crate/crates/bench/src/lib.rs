//! Criterion benchmarks for nodal-core; see `benches/`.
