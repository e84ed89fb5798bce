//! Benchmark harness (placeholder).
