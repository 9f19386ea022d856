//! Criterion benchmarks for the `strongdamp` kernels live in `benches/`.
