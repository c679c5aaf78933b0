//! Scenario files, traces, batch commands, and the stepping REPL.

mod commands;
mod repl;
mod scenario;
mod trace;

pub use commands::{cmd_eval, cmd_run, cmd_search, eval_protocol, OutputFormat, RunMode, Semantics};
pub use repl::cmd_repl;
pub use scenario::{parse_scenario, parse_scenario_json, print_scenario, ScenarioError};
pub use trace::{Trace, TraceEvent, TraceSummary};

/// Exit codes shared by the batch commands.
pub mod exit {
    /// Everything the command was asked to do succeeded.
    pub const OK: i32 = 0;
    /// Bad input or an evaluation error.
    pub const ERROR: i32 = 1;
    /// The schedule ran out before every session was resolved.
    pub const UNRESOLVED: i32 = 2;
    /// The search bound was exhausted.
    pub const BOUND: i32 = 3;
}
