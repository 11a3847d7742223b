use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, RunArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(passed: bool) -> Self {
        if passed {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Ok | Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub inertia: Option<Vec<String>>,
    pub delta: String,
    pub precision_bits: u32,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub output_format: Format,
    pub output_path: Option<String>,
}

impl RunConfig {
    pub fn new(run: &RunArgs, format: Format) -> Self {
        RunConfig {
            inertia: run.inertia.as_ref().map(|v| v.0.iter().map(|x| x.to_string()).collect()),
            delta: run.delta.to_string(),
            precision_bits: run.precision,
            tolerance: run.tol,
            seed: run.seed,
            output_format: format,
            output_path: run.out.as_ref().map(|p| p.display().to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub witnesses: Vec<Value>,
    pub timings: BTreeMap<String, f64>,
    pub result: Value,
}

/// Command output: a JSON report, plus CSV text when the command has a
/// tabular form.
pub struct Output {
    pub verdict: Verdict,
    pub witnesses: Vec<Value>,
    pub result: Value,
    pub csv: Option<String>,
}

impl Output {
    pub fn new(verdict: Verdict, result: impl Serialize) -> Result<Self> {
        Ok(Output { verdict, witnesses: Vec::new(), result: serde_json::to_value(result)?, csv: None })
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_witnesses(mut self, w: Vec<Value>) -> Self {
        self.witnesses = w;
        self
    }
}

pub fn emit(command: &str, run: &RunArgs, format: Format, started: Instant, out: Output) -> Result<u8> {
    let text = match format {
        Format::Csv => match out.csv {
            Some(csv) => csv,
            None => anyhow::bail!(UsageError(format!("{command} has no CSV form"))),
        },
        Format::Json => {
            let mut timings = BTreeMap::new();
            if run.timings {
                timings.insert("total_seconds".to_string(), started.elapsed().as_secs_f64());
            }
            let report = Report {
                command: command.to_string(),
                config: RunConfig::new(run, format),
                verdict: out.verdict,
                witnesses: out.witnesses,
                timings,
                result: out.result,
            };
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
    };
    write_text(run.out.as_deref(), &text)?;
    Ok(out.verdict.exit_code())
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Bad input that clap could not catch; exits with the usage code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
