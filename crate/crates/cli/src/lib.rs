//! Command-line front end: a JSON document format and the `check`, `transfer` and
//! `selftest` commands with deterministic plain-text reports.

pub mod commands;
pub mod document;
pub mod report;

/// Exit status for a malformed or inconsistent input document.
pub const EXIT_INPUT: i32 = 2;
