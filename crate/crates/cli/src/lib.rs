//! Command-line front end for the radial Schrödinger–Bopp–Podolsky solver.

pub mod config;
pub mod export;
pub mod record;
pub mod run;
pub mod summary;

pub use config::{parse_config, Command, ConfigError, ProbeKind, RunConfig, SweepMode};
pub use record::{Payload, RunRecord};
pub use run::{persist, run, RunError, RUN_STORE_ENV};

/// JSON schema of [`RunRecord`].
pub const RUN_RECORD_SCHEMA: &str = include_str!("../schema/run_record.schema.json");
