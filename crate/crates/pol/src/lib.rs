//! A workbench for public observation logic (POL).
//!
//! POL reasons about knowledge through the matching of *observations*
//! (strings over an action alphabet) against per-world *expectations*
//! (regular expressions over that alphabet). Observing a string removes
//! every world whose expectation has no continuation for it; knowledge
//! operators are then evaluated on what remains.
//!
//! The crate is organised around that pipeline:
//!
//! - [`obslang`]: observation expressions: parsing, language semantics,
//!   and residuation by symbol derivatives.
//! - [`polcore`]: epistemic expectation models, update by observation,
//!   and formula evaluation (including `[pi]` over star expressions).
//! - [`muddy`]: the muddy-children protocol built on those models:
//!   question updates, declarations, and question counts.
//! - [`parallel`]: parallel sessions with cross-session knowledge
//!   propagation, schedule execution, and minimal-schedule search.
//! - [`cli`]: scenario files, trace serialization, batch commands, and
//!   an interactive stepping REPL.

pub mod cli;
pub mod muddy;
pub mod obslang;
pub mod parallel;
pub mod polcore;

pub use muddy::{BitWorld, Event, EventKind, SessionId, SessionSpec, SessionState};
pub use obslang::{ActionSymbol, ObsExpr, ObsWord};
pub use parallel::{ParallelState, Scenario, Schedule};
pub use polcore::{Agent, EpistemicModel, ExpectationModel, Formula, Prop};
