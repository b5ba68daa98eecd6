//! Criterion benchmarks for `bnf-core`; see `benches/`.
