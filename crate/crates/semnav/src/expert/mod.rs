//! Expert trajectory pipeline (placeholder).
