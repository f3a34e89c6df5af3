//! Run configuration, dispatch and report writing for the command-line tool.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Command, Format, RunConfig};
pub use report::{write_report, RunResult, RunStatus};
pub use run::{exit_code, run};
