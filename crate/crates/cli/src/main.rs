mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::commands::{
    cmd_collar, cmd_decompose, cmd_extend, cmd_verify, cmd_zeros, pretty, write_file, Report,
};
use crate::config::{Cli, RunConfig, Subcmd};

const EXIT_PASS: u8 = 0;
const EXIT_INVARIANT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl From<nodal_core::Error> for Failure {
    fn from(e: nodal_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn sidecar_path(output: &std::path::Path) -> PathBuf {
    let mut s: OsString = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn run(cfg: &RunConfig) -> Result<Report, Failure> {
    let report = match cfg.subcommand {
        Subcmd::Decompose => cmd_decompose(cfg),
        Subcmd::Extend => cmd_extend(cfg),
        Subcmd::Zeros => cmd_zeros(cfg),
        Subcmd::Collar => cmd_collar(cfg),
        Subcmd::Verify => cmd_verify(cfg),
    }?;
    match &cfg.output {
        Some(path) => {
            write_file(path, &report.text)?;
            write_file(&sidecar_path(path), &pretty(&report.json))?;
        }
        None => print!("{}", report.text),
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            });
        }
    };
    let outcome = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(report) if report.passed => ExitCode::from(EXIT_PASS),
        Ok(report) => {
            if let Some(first) = report
                .json
                .get("first_counterexample")
                .filter(|v| !v.is_null())
            {
                eprintln!("invariant failed: {first}");
            } else {
                eprintln!("invariant failed");
            }
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical precondition failed: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
