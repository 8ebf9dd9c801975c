//! Criterion benchmarks for `bundlesec-core`; see `benches/engine.rs`.
