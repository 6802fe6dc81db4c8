//! Criterion benchmarks for the estimation engine and the tests; see
//! `benches/engine.rs`.
