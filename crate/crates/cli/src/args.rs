use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eulertop::ExactScalar;

#[derive(Parser, Debug)]
#[command(
    name = "eulertop",
    version,
    about = "Discrete Euler top: iteration, periodicity polynomials and verification runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterate the map from a rational state.
    Iterate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        state: Triple,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// The two invariants of a state.
    Invariants {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        state: Triple,
    },
    /// The fixed-point axes, or whether a state lies on one.
    FixedPoints {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        state: Option<Triple>,
    },
    /// Biquadratic parameters of the top, optionally after n steps.
    Biquad {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        state: Option<Triple>,
        #[arg(long, allow_hyphen_values = true)]
        h1: Option<ExactScalar>,
        #[arg(long, allow_hyphen_values = true)]
        h2: Option<ExactScalar>,
        /// 1, 2 or 3; all axes when omitted.
        #[arg(long)]
        axis: Option<u8>,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// The periodicity polynomial gamma_n of a generic biquadratic.
    Gamma {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        n: u32,
        /// Print only the polynomial text.
        #[arg(long)]
        print: bool,
        /// Evaluate at a,b,c,d,e,f.
        #[arg(long, value_parser = parse_six, allow_hyphen_values = true)]
        at: Option<Six>,
    },
    /// Divisibility of the level n-1 wedges by gamma_n.
    Correlate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        n: u32,
        /// Numeric a,b,c,d,e,f instead of generic symbols.
        #[arg(long, value_parser = parse_six, allow_hyphen_values = true)]
        params: Option<Six>,
    },
    /// The period-3 variety in xi-coordinates.
    Variety {
        #[command(subcommand)]
        action: VarietyCommand,
    },
    /// The axially symmetric top.
    Axisym {
        #[command(subcommand)]
        action: AxisymCommand,
    },
    /// Multi-start Newton search for real periodic points.
    Search {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        period: u32,
        #[arg(long = "box", value_parser = parse_pair_f64, allow_hyphen_values = true, default_value = "-5,5")]
        bounds: (f64, f64),
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Acceptance checks.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(value_enum)]
        target: VerifyTarget,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long = "box", value_parser = parse_pair_f64, allow_hyphen_values = true, default_value = "-5,5")]
        bounds: (f64, f64),
    },
}

#[derive(Subcommand, Debug)]
pub enum VarietyCommand {
    /// Complete (xi1, xi2) to points of v3 and lift them.
    Sample {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, allow_hyphen_values = true)]
        xi1: ExactScalar,
        #[arg(long, allow_hyphen_values = true)]
        xi2: ExactScalar,
    },
    /// Periodicity data of one state.
    Check {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        state: Triple,
    },
    /// Sample v3 over a grid of (xi1, xi2).
    Scan {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long = "box", value_parser = parse_pair_exact, allow_hyphen_values = true, default_value = "-2,1/2")]
        bounds: (ExactScalar, ExactScalar),
    },
}

#[derive(Subcommand, Debug)]
pub enum AxisymCommand {
    /// Quantized x1 values and the plane relation for period n.
    Quantize {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        n: u32,
    },
    /// Period certificate from a quantized x1.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        x2: ExactScalar,
        #[arg(long, allow_hyphen_values = true)]
        x3: ExactScalar,
        /// Use the -mu branch of x1.
        #[arg(long)]
        minus: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    All,
    #[value(name = "gamma3", alias = "γ3")]
    Gamma3,
    #[value(name = "gamma4", alias = "γ4")]
    Gamma4,
    #[value(name = "gamma5", alias = "γ5")]
    Gamma5,
    P3Collapse,
    Axisym,
}

impl VerifyTarget {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            VerifyTarget::All => &eulertop::verify::CRITERIA,
            VerifyTarget::Gamma3 => &[5],
            VerifyTarget::Gamma4 | VerifyTarget::Gamma5 => &[6],
            VerifyTarget::P3Collapse => &[7],
            VerifyTarget::Axisym => &[11],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// I1,I2,I3 (two values I1,I2 for axisym).
    #[arg(long, value_parser = parse_inertia, allow_hyphen_values = true)]
    pub inertia: Option<Inertia>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub delta: ExactScalar,
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings (reports are then not reproducible).
    #[arg(long)]
    pub timings: bool,
}

/// Comma-separated moments; a newtype so clap treats the list as one value.
#[derive(Clone, Debug, PartialEq)]
pub struct Inertia(pub Vec<ExactScalar>);

fn parse_inertia(s: &str) -> Result<Inertia, String> {
    parse_list(s).map(Inertia)
}

pub type Triple = [ExactScalar; 3];
pub type Six = [ExactScalar; 6];

pub fn parse_list(s: &str) -> Result<Vec<ExactScalar>, String> {
    s.split(',').map(|p| p.trim().parse::<ExactScalar>().map_err(|e| format!("{p:?}: {e}"))).collect()
}

fn parse_fixed<const N: usize>(s: &str) -> Result<[ExactScalar; N], String> {
    let v = parse_list(s)?;
    let len = v.len();
    v.try_into().map_err(|_| format!("expected {N} comma-separated values, got {len}"))
}

pub fn parse_triple(s: &str) -> Result<Triple, String> {
    parse_fixed::<3>(s)
}

pub fn parse_six(s: &str) -> Result<Six, String> {
    parse_fixed::<6>(s)
}

pub fn parse_pair_exact(s: &str) -> Result<(ExactScalar, ExactScalar), String> {
    let [a, b] = parse_fixed::<2>(s)?;
    if a >= b {
        return Err("expected lo,hi with lo < hi".into());
    }
    Ok((a, b))
}

pub fn parse_pair_f64(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = parse_pair_exact(s)?;
    Ok((a.to_f64(), b.to_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_triple("1,2/3,-4").unwrap()[1], "2/3".parse().unwrap());
        assert!(parse_triple("1,2").is_err());
        assert!(parse_pair_f64("5,-5").is_err());
        assert_eq!(parse_pair_f64("-5,5").unwrap(), (-5.0, 5.0));
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
