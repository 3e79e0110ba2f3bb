//! Benchmarks for supershift-core; see `benches/`.
