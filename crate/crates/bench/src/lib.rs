//! Criterion benchmarks for `stark-core`; see `benches/`.
