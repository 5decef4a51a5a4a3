//! Criterion benchmarks for training and prediction throughput; see `benches/`.
