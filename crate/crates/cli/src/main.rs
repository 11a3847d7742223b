mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{AxisymCommand, Cli, Command, Format, RunArgs, VarietyCommand};
use report::{emit, write_text, Output, UsageError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (name, run, default_format) = describe(&cli.command);
    match execute(&cli.command, started) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let report = json!({
                "command": name,
                "config": report::RunConfig::new(run, run.format.unwrap_or(default_format)),
                "verdict": "error",
                "error": format!("{e:#}"),
            });
            let text = serde_json::to_string_pretty(&report).unwrap_or_default() + "\n";
            let _ = write_text(run.out.as_deref(), &text);
            ExitCode::from(1)
        }
    }
}

/// Command name, shared options and default output format.
fn describe(cmd: &Command) -> (&'static str, &RunArgs, Format) {
    match cmd {
        Command::Iterate { run, .. } => ("iterate", run, Format::Csv),
        Command::Invariants { run, .. } => ("invariants", run, Format::Json),
        Command::FixedPoints { run, .. } => ("fixed-points", run, Format::Json),
        Command::Biquad { run, .. } => ("biquad", run, Format::Json),
        Command::Gamma { run, .. } => ("gamma", run, Format::Json),
        Command::Correlate { run, .. } => ("correlate", run, Format::Json),
        Command::Variety { action } => match action {
            VarietyCommand::Sample { run, .. } => ("variety sample", run, Format::Csv),
            VarietyCommand::Check { run, .. } => ("variety check", run, Format::Csv),
            VarietyCommand::Scan { run, .. } => ("variety scan", run, Format::Csv),
        },
        Command::Axisym { action } => match action {
            AxisymCommand::Quantize { run, .. } => ("axisym quantize", run, Format::Json),
            AxisymCommand::Verify { run, .. } => ("axisym verify", run, Format::Json),
        },
        Command::Search { run, .. } => ("search", run, Format::Json),
        Command::Verify { run, .. } => ("verify", run, Format::Json),
    }
}

fn execute(cmd: &Command, started: Instant) -> anyhow::Result<u8> {
    let (name, run, default_format) = describe(cmd);
    let format = run.format.unwrap_or(default_format);
    let out: Output = match cmd {
        Command::Iterate { run, state, steps } => commands::iterate(run, state, *steps)?,
        Command::Invariants { run, state } => commands::invariants_cmd(run, state)?,
        Command::FixedPoints { run, state } => commands::fixed_points(run, state.as_ref())?,
        Command::Biquad { run, state, h1, h2, axis, level } => {
            commands::biquad(run, state.as_ref(), h1.as_ref(), h2.as_ref(), *axis, *level)?
        }
        Command::Gamma { run, n, print, at } => {
            let (out, text) = commands::gamma(run, *n, *print, at.as_ref())?;
            if let Some(text) = text {
                write_text(run.out.as_deref(), &text)?;
                return Ok(0);
            }
            out
        }
        Command::Correlate { run, n, params } => commands::correlate(run, *n, params.as_ref())?,
        Command::Variety { action } => commands::variety(action)?,
        Command::Axisym { action } => commands::axisym_cmd(action)?,
        Command::Search { run, period, bounds, grid } => commands::search(run, *period, *bounds, *grid)?,
        Command::Verify { run, target, grid, bounds } => commands::verify_cmd(run, *target, *grid, *bounds)?,
    };
    emit(name, run, format, started, out)
}
