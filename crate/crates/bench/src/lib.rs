//! Criterion benchmarks for `hyperscheme`; see `benches/core.rs`.
//! Run with `cargo bench -p hyperscheme-bench`.
