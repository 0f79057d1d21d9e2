//! Scenario configuration, audit checks and file formats for the Kottler
//! IMCF laboratory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod io;
pub mod scenario;

pub use checks::{Check, CheckKind, Relation};
pub use config::{parse_config, parse_configs, ConfigError, ScenarioConfig};
pub use scenario::{run_scenario, AuditResult, RunOptions, ScenarioOutcome};
