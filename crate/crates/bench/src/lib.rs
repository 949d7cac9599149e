//! Benchmarks live in `benches/`; this crate has no library code of its own.

/// Term counts used by the streaming benchmarks.
pub const STREAM_TERMS: [u64; 2] = [2_000, 10_000];
