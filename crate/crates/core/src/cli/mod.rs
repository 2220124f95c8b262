//! Library side of the `bqlab` command: spec files, reports, suites, tables.

pub mod report;
pub mod run;
pub mod spec_file;
pub mod suites;
pub mod table;

pub use report::{render, ExperimentReport, Format};
pub use run::{cmd_run, RunOptions};
pub use spec_file::{load_spec, parse_spec, OracleSpec};
pub use suites::{cmd_verify, run_suite, SuiteResult, SUITES};
pub use table::{cmd_table, Table};
