//! Run traces: the global event log flattened into serializable records.
//!
//! Propagation records carry the *source* session in the `session` field
//! and the affected session under `propagated_to`; all other records
//! belong to the session they changed. The text and JSON renderings carry
//! exactly the same fields.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::muddy::{EventKind, SessionId};
use crate::parallel::{ParallelState, Scenario};
use crate::polcore::Agent;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub session: SessionId,
    pub q: usize,
    pub kind: String,
    pub removed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declarer: Option<Agent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagated_to: Option<SessionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceSummary {
    pub per_session: BTreeMap<SessionId, usize>,
    pub total: usize,
    pub resolved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub scenario: serde_json::Value,
    pub events: Vec<TraceEvent>,
    pub summary: TraceSummary,
}

impl Trace {
    pub fn from_run(scenario: &Scenario, state: &ParallelState) -> Trace {
        let events = state
            .log()
            .iter()
            .map(|(affected, event)| {
                let removed: Vec<String> =
                    event.removed.iter().map(|w| w.to_string()).collect();
                match &event.kind {
                    EventKind::Propagated { from } => TraceEvent {
                        session: from.clone(),
                        q: event.question_index,
                        kind: event.kind_name().to_string(),
                        removed,
                        declarer: None,
                        propagated_to: Some(affected.clone()),
                    },
                    EventKind::Declare { agent, .. } => TraceEvent {
                        session: affected.clone(),
                        q: event.question_index,
                        kind: event.kind_name().to_string(),
                        removed,
                        declarer: Some(agent.clone()),
                        propagated_to: None,
                    },
                    _ => TraceEvent {
                        session: affected.clone(),
                        q: event.question_index,
                        kind: event.kind_name().to_string(),
                        removed,
                        declarer: None,
                        propagated_to: None,
                    },
                }
            })
            .collect();
        let per_session = state
            .sessions()
            .iter()
            .map(|s| (s.id().clone(), s.asked()))
            .collect();
        Trace {
            scenario: scenario_value(scenario),
            events,
            summary: TraceSummary {
                per_session,
                total: state.total_asked(),
                resolved: state.all_answered(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&event_line(e));
            out.push('\n');
        }
        let counts: Vec<String> = self
            .summary
            .per_session
            .iter()
            .map(|(id, n)| format!("{id}={n}"))
            .collect();
        out.push_str(&counts.join(" "));
        out.push('\n');
        out.push_str(&format!(
            "total={} resolved={}\n",
            self.summary.total, self.summary.resolved
        ));
        out
    }
}

pub(crate) fn event_line(e: &TraceEvent) -> String {
    let mut line = format!(
        "[{} q{}] {} removed={{{}}}",
        e.session,
        e.q,
        e.kind,
        e.removed.join(",")
    );
    if let Some(declarer) = &e.declarer {
        line.push_str(&format!(" declarer={declarer}"));
    }
    if let Some(target) = &e.propagated_to {
        line.push_str(&format!(" to={target}"));
    }
    line
}

fn scenario_value(scenario: &Scenario) -> serde_json::Value {
    serde_json::json!({
        "sessions": scenario
            .sessions()
            .iter()
            .map(|s| {
                serde_json::json!({
                    "id": s.id(),
                    "agents": s.agents(),
                })
            })
            .collect::<Vec<_>>(),
        "muddy": scenario.muddy(),
    })
}
