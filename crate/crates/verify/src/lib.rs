//! End-to-end acceptance checks for the `hmseries` workspace.
//!
//! The library is empty; run `cargo test -p hmseries-verify` to execute the
//! checks in `tests/acceptance.rs`. Each check prints a single
//! `PASS`/`FAIL` line.
