//! End-to-end acceptance runs live in `tests/acceptance.rs`.
