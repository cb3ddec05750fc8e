//! Criterion benchmarks for `ct-core`; see `benches/order.rs`.
