//! Benchmark-only crate; the measurements live in `benches/stages.rs`.
