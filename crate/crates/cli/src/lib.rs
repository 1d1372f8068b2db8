//! Command implementations behind the `patchalg` binary.

pub mod commands;
pub mod corpus;
pub mod dot;
pub mod error;
pub mod report;
pub mod spec;
pub mod suites;
