//! Benchmark-only crate; see `benches/banks.rs`.
