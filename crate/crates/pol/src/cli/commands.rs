//! Batch commands behind the binary's subcommands. Each takes a parsed
//! scenario and a writer and returns the process exit code, so they can be
//! driven directly from tests.

use std::collections::BTreeSet;
use std::io::Write;

use crate::muddy::{questions_to_resolve, BitWorld, SessionId, SessionState};
use crate::obslang::ActionSymbol;
use crate::parallel::{
    run_schedule, search_min_schedule, sequential_total, ParallelError, Scenario, Schedule,
};
use crate::polcore::{parse_formula, EvalOptions, Formula, PolError};

use super::exit;
use super::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunMode {
    Schedule(Schedule),
    Sequential,
}

/// Box semantics selector for `eval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Semantics {
    Residuation,
    Existential,
    /// Box steps are interpreted as protocol questions: announcement,
    /// declarations, and nobody-knows eliminations, exactly as `run`
    /// applies them.
    #[default]
    Protocol,
}

pub fn cmd_run(
    scenario: &Scenario,
    mode: &RunMode,
    format: OutputFormat,
    out: &mut dyn Write,
) -> i32 {
    match mode {
        RunMode::Sequential => match sequential_run(scenario, format, out) {
            Ok(code) => code,
            Err(e) => {
                let _ = writeln!(out, "error: {e}");
                exit::ERROR
            }
        },
        RunMode::Schedule(schedule) => match run_schedule(scenario, schedule) {
            Ok(state) => {
                let trace = Trace::from_run(scenario, &state);
                let rendered = match format {
                    OutputFormat::Text => trace.to_text(),
                    OutputFormat::Json => trace.to_json(),
                };
                let _ = write!(out, "{rendered}");
                if state.all_answered() {
                    exit::OK
                } else {
                    exit::UNRESOLVED
                }
            }
            Err(e) => {
                let _ = writeln!(out, "error: {e}");
                exit::ERROR
            }
        },
    }
}

fn sequential_run(
    scenario: &Scenario,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<i32, ParallelError> {
    let mut counts = Vec::new();
    for spec in scenario.sessions() {
        counts.push((spec.id().clone(), questions_to_resolve(spec)?));
    }
    let total = sequential_total(scenario)?;
    match format {
        OutputFormat::Text => {
            for (id, n) in &counts {
                let _ = writeln!(out, "{id}: {n}");
            }
            let _ = writeln!(out, "total={total}");
        }
        OutputFormat::Json => {
            let per_session: serde_json::Map<String, serde_json::Value> = counts
                .iter()
                .map(|(id, n)| (id.to_string(), serde_json::json!(n)))
                .collect();
            let value = serde_json::json!({
                "per_session": per_session,
                "total": total,
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
    Ok(exit::OK)
}

pub fn cmd_search(
    scenario: &Scenario,
    bound: Option<usize>,
    format: OutputFormat,
    out: &mut dyn Write,
) -> i32 {
    let bound = match bound {
        Some(b) => b,
        // The sequential run is always a feasible schedule, so its total
        // is a safe default bound.
        None => match sequential_total(scenario) {
            Ok(total) => total.max(scenario.sessions().len()),
            Err(e) => {
                let _ = writeln!(out, "error: {e}");
                return exit::ERROR;
            }
        },
    };
    match search_min_schedule(scenario, bound) {
        Ok((min, schedule)) => {
            match format {
                OutputFormat::Text => {
                    let _ = writeln!(out, "min={min} schedule={schedule}");
                }
                OutputFormat::Json => {
                    let value = serde_json::json!({
                        "min": min,
                        "schedule": schedule.steps(),
                    });
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap());
                }
            }
            exit::OK
        }
        Err(
            e @ (ParallelError::BoundExceeded { .. } | ParallelError::BoundTooSmall { .. }),
        ) => {
            let _ = writeln!(out, "error: {e}");
            exit::BOUND
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit::ERROR
        }
    }
}

pub fn cmd_eval(
    scenario: &Scenario,
    session: &SessionId,
    formula_text: &str,
    semantics: Semantics,
    out: &mut dyn Write,
) -> i32 {
    let state = match scenario.session(session) {
        Some(spec) => match crate::muddy::build_session(spec) {
            Ok(state) => state,
            Err(e) => {
                let _ = writeln!(out, "error: {e}");
                return exit::ERROR;
            }
        },
        None => {
            let _ = writeln!(out, "error: unknown session `{session}`");
            return exit::ERROR;
        }
    };
    let formula = match parse_formula(formula_text, &session_alphabet()) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            return exit::ERROR;
        }
    };
    match eval_in_session(&state, &formula, semantics) {
        Ok(value) => {
            let _ = writeln!(out, "{value}");
            exit::OK
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit::ERROR
        }
    }
}

pub(crate) fn session_alphabet() -> BTreeSet<ActionSymbol> {
    [crate::muddy::question_symbol()].into_iter().collect()
}

/// Truth of the formula in the session's model, taken at every world.
pub(crate) fn eval_in_session(
    state: &SessionState,
    formula: &Formula,
    semantics: Semantics,
) -> Result<bool, PolError> {
    match semantics {
        Semantics::Residuation => state
            .model()
            .holds_everywhere(formula, &EvalOptions::default()),
        Semantics::Existential => state.model().holds_everywhere(
            formula,
            &EvalOptions { guard: crate::polcore::BoxGuard::Existential, ..EvalOptions::default() },
        ),
        Semantics::Protocol => {
            for w in state.worlds().clone() {
                if !eval_protocol(state, &w, formula)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Protocol reading of formulas: a box steps the session through real
/// questions (announcement, declarations, silence) instead of residuating
/// expectations, and a world that does not survive the steps satisfies the
/// box vacuously. Questions past the answering one are never asked, so
/// longer words drop out.
pub fn eval_protocol(
    state: &SessionState,
    w: &BitWorld,
    f: &Formula,
) -> Result<bool, PolError> {
    let cap = EvalOptions::default().word_cap;
    match f {
        Formula::Top => Ok(true),
        Formula::Atom(p) => {
            let holds_at = state
                .model()
                .skeleton
                .valuation
                .get(p)
                .ok_or_else(|| PolError::UnknownAtom(p.to_string()))?;
            Ok(holds_at.contains(w))
        }
        Formula::Not(inner) => Ok(!eval_protocol(state, w, inner)?),
        Formula::And(l, r) => Ok(eval_protocol(state, w, l)? && eval_protocol(state, w, r)?),
        Formula::Or(l, r) => Ok(eval_protocol(state, w, l)? || eval_protocol(state, w, r)?),
        Formula::Knows(agent, inner) => {
            let pairs = state
                .model()
                .skeleton
                .relations
                .get(agent)
                .ok_or_else(|| PolError::UnknownAgent(agent.to_string()))?;
            for (from, to) in pairs {
                if from == w && !eval_protocol(state, to, inner)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Box(pi, body) => {
            let qf = crate::muddy::question_symbol();
            let mut expr = pi.canonicalize();
            let mut cur = state.clone();
            let mut depth = 0usize;
            loop {
                if expr.is_empty_language() {
                    return Ok(true);
                }
                if expr.nullable()
                    && cur.model().contains_world(w)
                    && !eval_protocol(&cur, w, body)?
                {
                    return Ok(false);
                }
                let next_expr = expr.derivative(&qf);
                if next_expr.is_empty_language() || cur.is_answered() {
                    return Ok(true);
                }
                if depth >= cap {
                    return Err(PolError::BoundExceeded { cap });
                }
                let Ok((next_state, _)) = cur.ask_question() else {
                    return Ok(true);
                };
                cur = next_state;
                expr = next_expr;
                depth += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_scenario;

    fn running_example() -> Scenario {
        parse_scenario("session s1: a b\nsession s2: b c d\nsession s3: a d\nmuddy: a c d\n")
            .unwrap()
    }

    fn run_to_string(scenario: &Scenario, mode: &RunMode, format: OutputFormat) -> (i32, String) {
        let mut buf = Vec::new();
        let code = cmd_run(scenario, mode, format, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn run_reports_the_four_question_schedule() {
        let scenario = running_example();
        let (code, output) = run_to_string(
            &scenario,
            &RunMode::Schedule(Schedule::parse("s1,s1,s3,s2")),
            OutputFormat::Text,
        );
        assert_eq!(code, exit::OK);
        assert!(output.contains("total=4 resolved=true"), "{output}");
    }

    #[test]
    fn run_flags_an_exhausted_schedule() {
        let scenario = running_example();
        let (code, output) = run_to_string(
            &scenario,
            &RunMode::Schedule(Schedule::parse("s1")),
            OutputFormat::Text,
        );
        assert_eq!(code, exit::UNRESOLVED);
        assert!(output.contains("resolved=false"), "{output}");
    }

    #[test]
    fn run_sequential_prints_the_baseline() {
        let scenario = running_example();
        let (code, output) = run_to_string(&scenario, &RunMode::Sequential, OutputFormat::Text);
        assert_eq!(code, exit::OK);
        assert!(output.contains("s1: 2"));
        assert!(output.contains("s2: 3"));
        assert!(output.contains("s3: 3"));
        assert!(output.contains("total=8"));
    }

    #[test]
    fn run_errors_on_bad_schedules() {
        let scenario = running_example();
        let (code, output) = run_to_string(
            &scenario,
            &RunMode::Schedule(Schedule::parse("s9")),
            OutputFormat::Text,
        );
        assert_eq!(code, exit::ERROR);
        assert!(output.contains("unknown session"));
    }

    #[test]
    fn search_reports_the_minimum() {
        let scenario = running_example();
        let mut buf = Vec::new();
        let code = cmd_search(&scenario, None, OutputFormat::Text, &mut buf);
        assert_eq!(code, exit::OK);
        let output = String::from_utf8(buf).unwrap();
        assert!(output.contains("min=4 schedule="), "{output}");
    }

    #[test]
    fn search_bound_exhaustion_exits_three() {
        let scenario = running_example();
        let mut buf = Vec::new();
        let code = cmd_search(&scenario, Some(3), OutputFormat::Text, &mut buf);
        assert_eq!(code, exit::BOUND);
    }

    #[test]
    fn eval_modes_split_on_the_two_question_claim() {
        let scenario = running_example();
        let formula = "[QF;QF](K(a,m_a) & K(b,!m_b))";
        let s1 = SessionId::new("s1");

        let mut buf = Vec::new();
        assert_eq!(
            cmd_eval(&scenario, &s1, formula, Semantics::Protocol, &mut buf),
            exit::OK
        );
        assert_eq!(String::from_utf8(buf).unwrap().trim(), "true");

        let mut buf = Vec::new();
        assert_eq!(
            cmd_eval(&scenario, &s1, formula, Semantics::Residuation, &mut buf),
            exit::OK
        );
        assert_eq!(String::from_utf8(buf).unwrap().trim(), "false");
    }

    #[test]
    fn eval_truth_constant_and_errors() {
        let scenario = running_example();
        let s1 = SessionId::new("s1");
        for semantics in [Semantics::Residuation, Semantics::Existential, Semantics::Protocol] {
            let mut buf = Vec::new();
            assert_eq!(cmd_eval(&scenario, &s1, "T", semantics, &mut buf), exit::OK);
            assert_eq!(String::from_utf8(buf).unwrap().trim(), "true");
        }
        let mut buf = Vec::new();
        assert_eq!(
            cmd_eval(&scenario, &s1, "K(a m_a)", Semantics::Protocol, &mut buf),
            exit::ERROR
        );
        let mut buf = Vec::new();
        assert_eq!(
            cmd_eval(&scenario, &SessionId::new("nope"), "T", Semantics::Protocol, &mut buf),
            exit::ERROR
        );
    }

    #[test]
    fn protocol_star_boxes_terminate() {
        let scenario = running_example();
        let spec = scenario.session(&SessionId::new("s1")).unwrap();
        let state = crate::muddy::build_session(spec).unwrap();
        let f = parse_formula("[QF*](m_a | !m_a)", &session_alphabet()).unwrap();
        assert!(eval_in_session(&state, &f, Semantics::Protocol).unwrap());
        // After enough questions the session collapses to the actual
        // world, where a is muddy; a star box can see that moment.
        let f = parse_formula("[QF*] T", &session_alphabet()).unwrap();
        assert!(eval_in_session(&state, &f, Semantics::Protocol).unwrap());
    }
}
