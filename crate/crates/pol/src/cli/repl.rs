//! Interactive stepping through a parallel scenario with an undo stack.

use std::io::{BufRead, Write};

use crate::muddy::SessionId;
use crate::parallel::{ParallelState, Scenario};
use crate::polcore::parse_formula;

use super::commands::{eval_protocol, session_alphabet};
use super::trace::{event_line, Trace};

const HELP: &str = "\
commands:
  ask <session>             apply one father's question and propagate
  show <session>            world set, statuses, and counters
  knows <agent>             the agent's status in every session
  eval <session> <formula>  protocol-mode evaluation on the current model
  undo                      revert the last ask
  reset                     back to the initial state
  help                      this text
  quit                      leave";

/// Runs the command loop until `quit` or end of input. Command errors are
/// printed and leave the state untouched; the loop itself never fails.
pub fn cmd_repl(scenario: &Scenario, input: &mut dyn BufRead, out: &mut dyn Write) -> i32 {
    let initial = match ParallelState::new(scenario) {
        Ok(state) => state,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            return super::exit::ERROR;
        }
    };
    let mut state = initial.clone();
    let mut undo: Vec<ParallelState> = Vec::new();

    let _ = writeln!(out, "{} sessions loaded; `help` lists commands", scenario.sessions().len());
    loop {
        let _ = write!(out, "> ");
        let _ = out.flush();
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (command, rest) = match line.split_once(char::is_whitespace) {
            Some((c, r)) => (c, r.trim()),
            None => (line, ""),
        };
        match command {
            "quit" | "exit" => break,
            "help" => {
                let _ = writeln!(out, "{HELP}");
            }
            "ask" => {
                let id = SessionId::new(rest);
                match state.apply_action(&id) {
                    Ok(next) => {
                        let new_events = next.log().len() - state.log().len();
                        undo.push(std::mem::replace(&mut state, next));
                        let trace = Trace::from_run(scenario, &state);
                        for e in &trace.events[trace.events.len() - new_events..] {
                            let _ = writeln!(out, "{}", event_line(e));
                        }
                        report_flags(&state, out);
                    }
                    Err(e) => {
                        let _ = writeln!(out, "error: {e}");
                    }
                }
            }
            "show" => {
                let id = SessionId::new(rest);
                match state.session(&id) {
                    Ok(session) => {
                        let worlds: Vec<String> =
                            session.worlds().iter().map(|w| w.to_string()).collect();
                        let _ = writeln!(out, "worlds: {{{}}}", worlds.join(","));
                        for agent in session.spec().agents() {
                            let status = match session.muddy_status(agent) {
                                Ok(Some(true)) => "muddy",
                                Ok(Some(false)) => "clean",
                                _ => "unknown",
                            };
                            let _ = writeln!(out, "  {agent}: {status}");
                        }
                        let _ = writeln!(
                            out,
                            "asked={} answered={} resolved={}",
                            session.asked(),
                            session.is_answered(),
                            session.is_resolved()
                        );
                    }
                    Err(e) => {
                        let _ = writeln!(out, "error: {e}");
                    }
                }
            }
            "knows" => {
                let agent = crate::polcore::Agent::new(rest);
                let mut found = false;
                for session in state.sessions() {
                    if let Ok(status) = session.muddy_status(&agent) {
                        found = true;
                        let text = match status {
                            Some(true) => "muddy",
                            Some(false) => "clean",
                            None => "unknown",
                        };
                        let _ = writeln!(out, "{}: {text}", session.id());
                    }
                }
                if !found {
                    let _ = writeln!(out, "error: unknown agent `{rest}`");
                }
            }
            "eval" => {
                let (session_text, formula_text) = match rest.split_once(char::is_whitespace) {
                    Some((s, f)) => (s, f.trim()),
                    None => {
                        let _ = writeln!(out, "error: usage `eval <session> <formula>`");
                        continue;
                    }
                };
                let id = SessionId::new(session_text);
                match state.session(&id) {
                    Ok(session) => match parse_formula(formula_text, &session_alphabet()) {
                        Ok(formula) => {
                            let mut value = true;
                            let mut failure = None;
                            for w in session.worlds().clone() {
                                match eval_protocol(session, &w, &formula) {
                                    Ok(v) => value &= v,
                                    Err(e) => {
                                        failure = Some(e);
                                        break;
                                    }
                                }
                            }
                            match failure {
                                Some(e) => {
                                    let _ = writeln!(out, "error: {e}");
                                }
                                None => {
                                    let _ = writeln!(out, "{value}");
                                }
                            }
                        }
                        Err(e) => {
                            let _ = writeln!(out, "error: {e}");
                        }
                    },
                    Err(e) => {
                        let _ = writeln!(out, "error: {e}");
                    }
                }
            }
            "undo" => match undo.pop() {
                Some(previous) => {
                    state = previous;
                    let _ = writeln!(out, "undone; total_asked={}", state.total_asked());
                }
                None => {
                    let _ = writeln!(out, "nothing to undo");
                }
            },
            "reset" => {
                state = initial.clone();
                undo.clear();
                let _ = writeln!(out, "reset");
            }
            other => {
                let _ = writeln!(out, "error: unknown command `{other}`");
            }
        }
    }
    super::exit::OK
}

fn report_flags(state: &ParallelState, out: &mut dyn Write) {
    if state.all_answered() {
        let _ = writeln!(out, "all sessions resolved; total_asked={}", state.total_asked());
    } else {
        let _ = writeln!(out, "total_asked={}", state.total_asked());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_scenario;
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    fn running_example() -> Scenario {
        parse_scenario("session s1: a b\nsession s2: b c d\nsession s3: a d\nmuddy: a c d\n")
            .unwrap()
    }

    fn drive(script: &str) -> String {
        let scenario = running_example();
        let mut input = script.as_bytes();
        let mut out = Vec::new();
        assert_eq!(cmd_repl(&scenario, &mut input, &mut out), 0);
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn the_four_ask_script_resolves_everything() {
        let output = drive("ask s1\nask s1\nask s3\nask s2\nquit\n");
        assert!(output.contains("all sessions resolved; total_asked=4"), "{output}");
    }

    #[test]
    fn undo_restores_the_initial_counts() {
        let output = drive("ask s1\nundo\nshow s2\nquit\n");
        assert!(output.contains("undone; total_asked=0"));
        assert!(output.contains("worlds: {000,001,010,011,100,101,110,111}"), "{output}");
    }

    #[test]
    fn undo_is_an_exact_inverse() {
        let scenario = running_example();
        let initial = ParallelState::new(&scenario).unwrap();
        let hash_of = |state: &ParallelState| {
            let mut hasher = DefaultHasher::new();
            format!("{state:?}").hash(&mut hasher);
            hasher.finish()
        };
        let before = hash_of(&initial);
        let after_ask = initial.apply_action(&SessionId::new("s1")).unwrap();
        assert_ne!(before, hash_of(&after_ask));
        // The REPL's undo is a stack pop of stored states; the state the
        // user sees after `ask; undo` must match the original exactly.
        let s2_view = "show s1\nshow s2\nshow s3\n";
        let unperturbed = drive(&format!("{s2_view}quit\n"));
        let round_trip = drive(&format!("ask s1\nundo\n{s2_view}quit\n"));
        let tail = |s: &str| {
            s.lines()
                .filter(|l| l.starts_with("worlds:") || l.starts_with("asked="))
                .map(String::from)
                .collect::<Vec<_>>()
        };
        assert_eq!(tail(&unperturbed), tail(&round_trip));
    }

    #[test]
    fn errors_keep_the_loop_alive() {
        let output = drive("ask s9\nshow s9\nknows z\nnonsense\neval s1\nquit\n");
        assert!(output.contains("error: unknown session `s9`"));
        assert!(output.contains("error: unknown agent `z`"));
        assert!(output.contains("error: unknown command `nonsense`"));
        assert!(output.contains("usage `eval <session> <formula>`"));
        // Still accepts a valid command at the end.
        let output = drive("ask s9\nask s1\nquit\n");
        assert!(output.contains("total_asked=1"));
    }

    #[test]
    fn show_and_knows_report_statuses() {
        let output = drive("ask s1\nask s1\nshow s1\nknows a\nquit\n");
        assert!(output.contains("worlds: {10}"));
        assert!(output.contains("a: muddy"));
        assert!(output.contains("b: clean"));
        assert!(output.contains("s1: muddy"));
        assert!(output.contains("s3: muddy"));
        // s2 does not contain a.
        assert!(!output.contains("s2: muddy\n"));
    }

    #[test]
    fn eval_in_the_repl_uses_the_current_model() {
        let output = drive("eval s1 K(a,m_a)\nask s1\nask s1\neval s1 K(a,m_a)\nquit\n");
        // Prompts share the line with the following answer.
        let answers: Vec<&str> = output
            .lines()
            .map(|l| l.trim_start_matches("> "))
            .filter(|l| *l == "true" || *l == "false")
            .collect();
        assert_eq!(answers, vec!["false", "true"], "{output}");
    }

    #[test]
    fn reset_returns_to_the_start() {
        let output = drive("ask s1\nask s1\nreset\nshow s1\nquit\n");
        assert!(output.contains("reset"));
        assert!(output.contains("worlds: {00,01,10,11}"), "{output}");
    }
}
