//! Command-line frontend for `qavail`.
//!
//! [`run`] takes the argument vector and the raw value of the joint-dimension
//! cap variable, and returns the exit code with everything that would be
//! written to the two output streams. The binary is a thin wrapper around it.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error or failed self-test,
//! 3 resource cap exceeded.

mod args;
mod commands;
mod report;
mod selftest;

use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use report::Report;

/// Overrides the largest allowed `M·N` for estimation and scenarios.
pub const JOINT_CAP_ENV: &str = "QAVAIL_MAX_JOINT_DIM";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Domain(qavail::Error),
    SelftestFailed(Box<Report>),
}

impl From<qavail::Error> for Failure {
    fn from(e: qavail::Error) -> Self {
        Failure::Domain(e)
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn run<I, T>(argv: I, joint_cap: Option<&str>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Output {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };

    let start = Instant::now();
    let outcome = parse_cap(joint_cap).and_then(|cap| dispatch(cli.command, cap));
    let wall = start.elapsed();
    match outcome {
        Ok(report) => Output {
            code: 0,
            stdout: report.render(wall),
            stderr: String::new(),
        },
        Err(Failure::SelftestFailed(report)) => Output {
            code: 2,
            stdout: report.render(wall),
            stderr: "selftest: one or more checks failed\n".into(),
        },
        Err(Failure::Usage(msg)) => Output {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Domain(e)) => Output {
            code: if e.is_resource_cap() { 3 } else { 2 },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn parse_cap(raw: Option<&str>) -> Result<usize, Failure> {
    match raw {
        None => Ok(qavail::estimate::DEFAULT_JOINT_CAP),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => Ok(cap),
            _ => Err(usage(format!(
                "{JOINT_CAP_ENV} must be a positive integer, got {s:?}"
            ))),
        },
    }
}

fn dispatch(command: Command, cap: usize) -> Result<Report, Failure> {
    match command {
        Command::Amplify(a) => commands::amplify(&a),
        Command::Estimate(a) => commands::estimate(&a, cap),
        Command::Count(a) => commands::count(&a, cap),
        Command::ScenarioLetter(a) => commands::letter(&a, cap),
        Command::ScenarioNames(a) => commands::names(&a, cap),
        Command::Selftest(a) => selftest::run(&a),
    }
}
