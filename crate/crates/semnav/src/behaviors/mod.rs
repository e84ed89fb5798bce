//! Navigational and perceptual behaviors (placeholder).
