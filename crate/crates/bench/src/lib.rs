//! Criterion benchmarks for `cognate-core`; see `benches/`.
