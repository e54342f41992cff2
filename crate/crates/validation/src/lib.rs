//! Acceptance checks for `gh-core` live in `tests/acceptance.rs`; run them
//! with `cargo test -p gh-validation --test acceptance`.
