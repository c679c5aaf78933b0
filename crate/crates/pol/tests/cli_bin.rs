//! End-to-end runs of the compiled binary: flags, file formats, exit
//! codes, and the REPL over a pipe.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

const RUNNING_EXAMPLE: &str = "\
# three overlapping groups
session s1: a b
session s2: b c d
session s3: a d
muddy: a c d
";

fn scenario_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn pol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn run_schedule_exits_zero_when_everything_resolves() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let out = pol(&["run", file.to_str().unwrap(), "--schedule", "s1,s1,s3,s2"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout_of(&out);
    assert!(text.contains("total=4 resolved=true"), "{text}");
    assert!(text.contains("[s1 q1] announce removed={00}"), "{text}");
    assert!(text.contains("declarer=a"), "{text}");
}

#[test]
fn run_short_schedule_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let out = pol(&["run", file.to_str().unwrap(), "--schedule", "s1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).contains("resolved=false"));
}

#[test]
fn run_sequential_reports_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let out = pol(&["run", file.to_str().unwrap(), "--sequential"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for needle in ["s1: 2", "s2: 3", "s3: 3", "total=8"] {
        assert!(text.contains(needle), "{text}");
    }
}

#[test]
fn run_json_format_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let out = pol(&[
        "run",
        file.to_str().unwrap(),
        "--schedule",
        "s1,s1,s3,s2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["summary"]["total"], 4);
    assert_eq!(value["summary"]["resolved"], true);
    assert_eq!(value["scenario"]["muddy"][0], "a");
    assert!(value["events"].as_array().unwrap().len() >= 4);
}

#[test]
fn json_scenario_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(
        &dir,
        "three.json",
        r#"{
            "sessions": [
                {"id": "s1", "agents": ["a", "b"]},
                {"id": "s2", "agents": ["b", "c", "d"]},
                {"id": "s3", "agents": ["a", "d"]}
            ],
            "muddy": ["a", "c", "d"]
        }"#,
    );
    let out = pol(&[
        "run",
        file.to_str().unwrap(),
        "--json",
        "--schedule",
        "s1,s1,s3,s2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout_of(&out).contains("total=4 resolved=true"));
}

#[test]
fn search_prints_the_minimum_and_respects_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let out = pol(&["search", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("min=4 schedule="));

    let out = pol(&["search", file.to_str().unwrap(), "--bound", "3"]);
    assert_eq!(out.status.code(), Some(3));

    let out = pol(&["search", file.to_str().unwrap(), "--bound", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn search_found_schedules_replay_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let out = pol(&["search", file.to_str().unwrap()]);
    let text = stdout_of(&out);
    let schedule = text
        .trim()
        .split("schedule=")
        .nth(1)
        .expect("schedule in output");
    let rerun = pol(&["run", file.to_str().unwrap(), "--schedule", schedule]);
    assert_eq!(rerun.status.code(), Some(0), "witness `{schedule}` failed");
}

#[test]
fn eval_semantics_flags() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let formula = "[QF;QF](K(a,m_a) & K(b,!m_b))";
    let path = file.to_str().unwrap();

    let out = pol(&["eval", path, formula, "--session", "s1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).trim(), "true");

    let out = pol(&["eval", path, formula, "--session", "s1", "--semantics", "def7"]);
    assert_eq!(stdout_of(&out).trim(), "false");

    let out = pol(&["eval", path, "T", "--session", "s2", "--semantics", "sec3"]);
    assert_eq!(stdout_of(&out).trim(), "true");

    let out = pol(&["eval", path, "K(a m_a)", "--session", "s1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_files_and_bad_scenarios_exit_one() {
    let out = pol(&["run", "/nonexistent.pol", "--sequential"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "bad.pol", "session s1: a b\nmuddy: b\n# a never muddy is fine; s1 has b\nsession s2: c\n");
    let out = pol(&["run", file.to_str().unwrap(), "--sequential"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repl_round_trip_over_a_pipe() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario_file(&dir, "three.pol", RUNNING_EXAMPLE);
    let mut child = Command::new(env!("CARGO_BIN_EXE_pol"))
        .args(["repl", file.to_str().unwrap()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"ask s1\nask s1\nask s3\nask s2\nundo\nask s2\nquit\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all sessions resolved; total_asked=4"), "{text}");
    assert!(text.contains("undone; total_asked=3"), "{text}");
}
