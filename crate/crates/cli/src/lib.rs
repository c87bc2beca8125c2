//! Driver for the verification suite and the `chern` command-line tool.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

pub use chern_core::sample::random_metric;
pub use commands::{cmd_decompose, cmd_eval, CliError, EvalTarget};
pub use config::{CheckKind, Plan, VerifyConfig};
pub use report::{without_timing, CheckRecord, Report};
pub use verify::cmd_verify;
