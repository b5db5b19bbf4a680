//! Criterion benchmarks for the solvers; see `benches/solvers.rs`.
//!
//! `cargo bench -p prodesign-bench`
