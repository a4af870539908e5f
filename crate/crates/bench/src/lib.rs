//! Criterion benchmarks for `telegraph-core`; see `benches/telegraph.rs`.
