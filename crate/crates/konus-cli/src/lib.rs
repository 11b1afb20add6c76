//! Batch front end for cost-of-living index computations.
//!
//! The binary (`konus`) reads scenario files describing per-time utilities,
//! prices, and a cost-adjustment choice, and writes deterministic CSV
//! tables of index values. See [`scenario`] for the file format and
//! [`commands`] for the command implementations.

pub mod commands;
pub mod scenario;
pub mod table;

pub use commands::{run_index, run_transport, validate_runtime, CliError, ValidationOutcome};
pub use scenario::{parse, render, to_runtime, Runtime, ScenarioFile};
pub use table::{format_fixed12, ResultTable};
