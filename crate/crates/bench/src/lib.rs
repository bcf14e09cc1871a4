//! Criterion benchmarks for the exact kernels in `singres-core`; see `benches/`.
