//! Benchmark-only crate; the targets live in `benches/invariants.rs`.
