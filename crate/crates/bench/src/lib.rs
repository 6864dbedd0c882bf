//! Benchmarks for the irrtoric core live in `benches/`; run them with
//! `cargo bench -p irrtoric-bench`.
