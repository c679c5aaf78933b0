//! The scenario file format.
//!
//! Line oriented: one `session <id>: <agent> <agent> ...` per line, then
//! `muddy: <agent> ...`; `#` starts a comment. The same fields are
//! accepted as JSON (`{"sessions": [{"id": ..., "agents": [...]}, ...],
//! "muddy": [...]}`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::muddy::SessionId;
use crate::parallel::{ParallelError, Scenario};
use crate::polcore::Agent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON scenario: {0}")]
    Json(String),
    #[error(transparent)]
    Semantic(#[from] ParallelError),
}

fn is_ident(tok: &str) -> bool {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the line-oriented scenario format. Session and agent order is
/// kept exactly as written.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut sessions: Vec<(SessionId, Vec<Agent>)> = Vec::new();
    let mut muddy: Option<BTreeSet<Agent>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ScenarioError::Syntax { line: line_no, message };

        if let Some(rest) = line.strip_prefix("session") {
            let rest = rest.trim_start();
            let (id, agents_text) = rest
                .split_once(':')
                .ok_or_else(|| err("expected `session <id>: <agents>`".into()))?;
            let id = id.trim();
            if !is_ident(id) {
                return Err(err(format!("invalid session id `{id}`")));
            }
            let agents: Vec<Agent> = agents_text
                .split_whitespace()
                .map(|tok| {
                    if is_ident(tok) {
                        Ok(Agent::new(tok))
                    } else {
                        Err(err(format!("invalid agent name `{tok}`")))
                    }
                })
                .collect::<Result<_, _>>()?;
            if agents.is_empty() {
                return Err(err(format!("session `{id}` lists no agents")));
            }
            sessions.push((SessionId::new(id), agents));
        } else if let Some(rest) = line.strip_prefix("muddy") {
            let rest = rest.trim_start();
            let names = rest
                .strip_prefix(':')
                .ok_or_else(|| err("expected `muddy: <agents>`".into()))?;
            if muddy.is_some() {
                return Err(err("duplicate `muddy:` line".into()));
            }
            let set: BTreeSet<Agent> = names
                .split_whitespace()
                .map(|tok| {
                    if is_ident(tok) {
                        Ok(Agent::new(tok))
                    } else {
                        Err(err(format!("invalid agent name `{tok}`")))
                    }
                })
                .collect::<Result<_, _>>()?;
            muddy = Some(set);
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }

    let muddy = muddy.ok_or(ScenarioError::Syntax {
        line: text.lines().count() + 1,
        message: "missing `muddy:` line".into(),
    })?;
    Ok(Scenario::new(sessions, muddy)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioJson {
    sessions: Vec<SessionJson>,
    muddy: Vec<Agent>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SessionJson {
    id: SessionId,
    agents: Vec<Agent>,
}

/// Parses the JSON form of the same fields.
pub fn parse_scenario_json(text: &str) -> Result<Scenario, ScenarioError> {
    let parsed: ScenarioJson =
        serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))?;
    let sessions = parsed
        .sessions
        .into_iter()
        .map(|s| (s.id, s.agents))
        .collect();
    Ok(Scenario::new(sessions, parsed.muddy.into_iter().collect())?)
}

/// Canonical text form; `parse_scenario` of the output reproduces the
/// scenario.
pub fn print_scenario(scenario: &Scenario) -> String {
    let mut out = String::new();
    for spec in scenario.sessions() {
        let agents: Vec<String> = spec.agents().iter().map(|a| a.to_string()).collect();
        out.push_str(&format!("session {}: {}\n", spec.id(), agents.join(" ")));
    }
    let muddy: Vec<String> = scenario.muddy().iter().map(|a| a.to_string()).collect();
    out.push_str(&format!("muddy: {}\n", muddy.join(" ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const RUNNING_EXAMPLE: &str = "\
# three overlapping groups
session s1: a b
session s2: b c d
session s3: a d
muddy: a c d
";

    #[test]
    fn parses_the_running_example() {
        let sc = parse_scenario(RUNNING_EXAMPLE).unwrap();
        assert_eq!(sc.sessions().len(), 3);
        assert_eq!(sc.sessions()[0].agents().len(), 2);
        assert_eq!(sc.sessions()[1].agents().len(), 3);
        assert_eq!(sc.sessions()[2].agents().len(), 2);
        let muddy: Vec<String> = sc.muddy().iter().map(|a| a.to_string()).collect();
        assert_eq!(muddy, vec!["a", "c", "d"]);
    }

    #[test]
    fn rejects_a_session_with_no_muddy_agent() {
        let text = "session s1: a b\nsession s2: c\nmuddy: a\n";
        match parse_scenario(text) {
            Err(ScenarioError::Semantic(ParallelError::Session(e))) => {
                assert!(e.to_string().contains("s2"));
            }
            other => panic!("expected false-announcement error, got {other:?}"),
        }
    }

    #[test]
    fn reports_line_numbers() {
        let text = "session s1: a b\nsess s2: c\nmuddy: a\n";
        match parse_scenario(text) {
            Err(ScenarioError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_scenario("session s1: a\n"),
            Err(ScenarioError::Syntax { .. })
        ));
        assert!(matches!(
            parse_scenario("session s1: a\nmuddy: z\nmuddy: a\n"),
            Err(ScenarioError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn unknown_muddy_agent_is_semantic() {
        assert!(matches!(
            parse_scenario("session s1: a\nmuddy: a z\n"),
            Err(ScenarioError::Semantic(ParallelError::UnknownMuddyAgent(_)))
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        let sc = parse_scenario(RUNNING_EXAMPLE).unwrap();
        let printed = print_scenario(&sc);
        let reparsed = parse_scenario(&printed).unwrap();
        assert_eq!(sc, reparsed);
        assert_eq!(print_scenario(&reparsed), printed);
    }

    #[test]
    fn json_form_matches_the_text_form() {
        let json = r#"{
            "sessions": [
                {"id": "s1", "agents": ["a", "b"]},
                {"id": "s2", "agents": ["b", "c", "d"]},
                {"id": "s3", "agents": ["a", "d"]}
            ],
            "muddy": ["a", "c", "d"]
        }"#;
        let from_json = parse_scenario_json(json).unwrap();
        let from_text = parse_scenario(RUNNING_EXAMPLE).unwrap();
        assert_eq!(from_json, from_text);
        assert!(matches!(
            parse_scenario_json("{\"sessions\": []}"),
            Err(ScenarioError::Json(_))
        ));
    }
}
