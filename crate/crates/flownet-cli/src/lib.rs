//! Shared plumbing for the `flownet` binary and its test suites.
//!
//! The library half of this crate exists so that the canonical experiment
//! pipelines are callable both from the command line (`flownet reproduce`)
//! and directly from integration tests, without going through a subprocess.
//! [`experiments`] holds the presets and the stage runner; [`artifacts`]
//! holds the CSV writers, the value-file reader, and the JSON-lines logger
//! that every stage reports through.

pub mod artifacts;
pub mod experiments;
