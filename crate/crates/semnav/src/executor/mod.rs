//! Mission executor (placeholder).
