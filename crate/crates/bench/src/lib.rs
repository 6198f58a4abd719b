//! Criterion benchmarks for toptrap-core live in `benches/`.
