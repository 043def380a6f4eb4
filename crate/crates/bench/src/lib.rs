//! Criterion benchmarks for the rendering and analysis kernels; see `benches/`.
