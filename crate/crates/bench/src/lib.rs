//! Benchmark-only crate; see `benches/chains.rs`.
