use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pol::cli::{self, cmd_eval, cmd_run, cmd_search, RunMode, Semantics};
use pol::muddy::SessionId;
use pol::parallel::{Scenario, Schedule};

#[derive(Parser)]
#[command(
    name = "pol",
    about = "Muddy-children sessions under public observation logic",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a schedule of father's questions, or the sequential baseline.
    Run {
        /// Scenario file.
        file: PathBuf,
        /// Comma-separated session ids, e.g. `s1,s1,s3,s2`.
        #[arg(long, conflicts_with = "sequential")]
        schedule: Option<String>,
        /// Run every session independently and report the counts.
        #[arg(long)]
        sequential: bool,
        #[arg(long, value_enum, default_value_t = ArgFormat::Text)]
        format: ArgFormat,
        /// Treat the scenario file as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Find a schedule resolving every session with the fewest questions.
    Search {
        file: PathBuf,
        /// Largest total question count to explore (default: the
        /// sequential total).
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, value_enum, default_value_t = ArgFormat::Text)]
        format: ArgFormat,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula on a fresh session model.
    Eval {
        file: PathBuf,
        /// Formula, e.g. `[QF;QF](K(a,m_a) & K(b,!m_b))`.
        formula: String,
        #[arg(long)]
        session: String,
        #[arg(long, value_enum, default_value_t = ArgSemantics::Protocol)]
        semantics: ArgSemantics,
        #[arg(long)]
        json: bool,
    },
    /// Step schedules interactively, with undo.
    Repl {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ArgFormat {
    Text,
    Json,
}

impl From<ArgFormat> for cli::OutputFormat {
    fn from(value: ArgFormat) -> Self {
        match value {
            ArgFormat::Text => cli::OutputFormat::Text,
            ArgFormat::Json => cli::OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ArgSemantics {
    #[value(name = "def7")]
    Residuation,
    #[value(name = "sec3")]
    Existential,
    Protocol,
}

impl From<ArgSemantics> for Semantics {
    fn from(value: ArgSemantics) -> Self {
        match value {
            ArgSemantics::Residuation => Semantics::Residuation,
            ArgSemantics::Existential => Semantics::Existential,
            ArgSemantics::Protocol => Semantics::Protocol,
        }
    }
}

fn load_scenario(path: &PathBuf, json: bool) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let parsed = if json {
        cli::parse_scenario_json(&text)
    } else {
        cli::parse_scenario(&text)
    };
    parsed.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let mut stdout = io::stdout().lock();
    let code = match args.command {
        Command::Run { file, schedule, sequential, format, json } => {
            match load_scenario(&file, json) {
                Ok(scenario) => {
                    let mode = if sequential {
                        RunMode::Sequential
                    } else {
                        match schedule {
                            Some(text) => RunMode::Schedule(Schedule::parse(&text)),
                            None => {
                                let _ = writeln!(
                                    stdout,
                                    "error: pass `--schedule <ids>` or `--sequential`"
                                );
                                return ExitCode::from(cli::exit::ERROR as u8);
                            }
                        }
                    };
                    cmd_run(&scenario, &mode, format.into(), &mut stdout)
                }
                Err(e) => {
                    let _ = writeln!(stdout, "error: {e}");
                    cli::exit::ERROR
                }
            }
        }
        Command::Search { file, bound, format, json } => match load_scenario(&file, json) {
            Ok(scenario) => cmd_search(&scenario, bound, format.into(), &mut stdout),
            Err(e) => {
                let _ = writeln!(stdout, "error: {e}");
                cli::exit::ERROR
            }
        },
        Command::Eval { file, formula, session, semantics, json } => {
            match load_scenario(&file, json) {
                Ok(scenario) => cmd_eval(
                    &scenario,
                    &SessionId::new(&session),
                    &formula,
                    semantics.into(),
                    &mut stdout,
                ),
                Err(e) => {
                    let _ = writeln!(stdout, "error: {e}");
                    cli::exit::ERROR
                }
            }
        }
        Command::Repl { file, json } => match load_scenario(&file, json) {
            Ok(scenario) => {
                let stdin = io::stdin();
                let mut input = stdin.lock();
                cli::cmd_repl(&scenario, &mut input, &mut stdout)
            }
            Err(e) => {
                let _ = writeln!(stdout, "error: {e}");
                cli::exit::ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
