//! Bundled JSON schema for command outputs.

/// One definition per command under `$defs`, keyed by command name.
pub const SCHEMA: &str = include_str!("../schema/output.schema.json");
