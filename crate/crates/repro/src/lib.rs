//! Acceptance checks for the dams simulator live in `tests/acceptance.rs`;
//! run them with `cargo test -p dams-repro --test acceptance`.
