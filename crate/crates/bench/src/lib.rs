//! Criterion benchmarks for the heavy pipelines; see `benches/pipelines.rs`.
