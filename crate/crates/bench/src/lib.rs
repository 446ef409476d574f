//! Criterion benchmarks for the quad-curl kernels live under `benches/`.
