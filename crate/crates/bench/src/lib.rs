//! Criterion benchmarks for `adbqc`; see `benches/`.
