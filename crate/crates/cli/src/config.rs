//! Command-line arguments and their validation into a run configuration.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use superosc::{parse_real, symmetrize_domain, Domain, Precision, Real, SolveMethod};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "superosc", version, about = "Design yield-optimized superoscillating signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Optimal signal, its yield and plot-ready samples.
    Design(CommonArgs),
    /// All stationary yields and their signals.
    Spectrum(CommonArgs),
    /// Minimum-energy interpolant and unconstrained concentration modes.
    Baseline(CommonArgs),
    /// Scaling sweep over a (--a-values) or monotonicity table over M (--m-values).
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Secular,
    Polynomial,
    Both,
}

impl From<MethodArg> for SolveMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Secular => SolveMethod::Secular,
            MethodArg::Polynomial => SolveMethod::Polynomial,
            MethodArg::Both => SolveMethod::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Highest harmonic N.
    #[arg(long, short = 'n')]
    pub band_limit: usize,

    /// Number of alternating constraints M.
    #[arg(long, short = 'm')]
    pub constraints: usize,

    /// Single symmetric interval (-A, A).
    #[arg(long, value_name = "A", allow_hyphen_values = true, group = "region")]
    pub interval: Option<String>,

    /// Symmetric pair (-B, -A) ∪ (A, B).
    #[arg(long, num_args = 2, value_names = ["A", "B"], group = "region")]
    pub annulus: Option<Vec<String>>,

    /// General domain "lo,hi;lo,hi" in radians.
    #[arg(long, value_name = "INTERVALS", allow_hyphen_values = true, group = "region")]
    pub domain: Option<String>,

    /// Interval "lo,hi" carrying the constraints (default: right-most part of the domain).
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub constraint_span: Option<String>,

    #[command(flatten)]
    pub output: OutputArgs,

    #[arg(long, value_enum, default_value = "secular")]
    pub method: MethodArg,

    /// Seed of the random completion of the constraint frame.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Samples per plotted range (0 disables series).
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// "fast" for f64, or a number of significant decimal digits (>= 15).
    #[arg(long, default_value = "100")]
    pub precision: String,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    /// Output file; series CSV files are written next to it.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,

    /// Record wall-clock time (makes output non-deterministic).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, short = 'n')]
    pub band_limit: usize,

    /// M for a scaling sweep.
    #[arg(long, short = 'm')]
    pub constraints: Option<usize>,

    /// Comma-separated interval half-widths, e.g. "1/64,1/32,1/16".
    #[arg(long, value_name = "LIST")]
    pub a_values: Option<String>,

    /// Comma-separated constraint counts for a monotonicity table.
    #[arg(long, value_name = "LIST")]
    pub m_values: Option<String>,

    /// Interval half-width for a monotonicity table.
    #[arg(long, value_name = "A")]
    pub interval: Option<String>,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_precision(text: &str) -> Result<Precision, CliError> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("fast") {
        return Ok(Precision::FAST);
    }
    let digits: u32 = t
        .parse()
        .map_err(|_| CliError::Invalid(format!("precision must be \"fast\" or a digit count, got {text:?}")))?;
    Ok(Precision::new(digits)?)
}

/// Which region flag was used, kept as text for the config echo.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Interval { a: String },
    Annulus { a: String, b: String },
    General { intervals: String },
}

impl DomainSpec {
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        match (&args.interval, &args.annulus, &args.domain) {
            (Some(a), None, None) => Ok(DomainSpec::Interval { a: a.clone() }),
            (None, Some(ab), None) => Ok(DomainSpec::Annulus { a: ab[0].clone(), b: ab[1].clone() }),
            (None, None, Some(d)) => Ok(DomainSpec::General { intervals: d.clone() }),
            _ => Err(CliError::Invalid("give exactly one of --interval, --annulus, --domain".into())),
        }
    }

    pub fn build<R: Real>(&self, prec: Precision) -> Result<Domain<R>, CliError> {
        Ok(match self {
            DomainSpec::Interval { a } => Domain::interval(parse_real(a, prec)?, prec)?,
            DomainSpec::Annulus { a, b } => symmetrize_domain(parse_real(a, prec)?, parse_real(b, prec)?, prec)?,
            DomainSpec::General { intervals } => Domain::parse(intervals, prec)?,
        })
    }
}

pub fn parse_span<R: Real>(text: &str, prec: Precision) -> Result<(R, R), CliError> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| CliError::Invalid(format!("constraint span must be \"lo,hi\", got {text:?}")))?;
    Ok((parse_real(lo, prec)?, parse_real(hi, prec)?))
}

pub fn parse_list<T, F>(text: &str, mut item: F) -> Result<Vec<T>, CliError>
where
    F: FnMut(&str) -> Result<T, CliError>,
{
    let values =
        text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(&mut item).collect::<Result<Vec<T>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Invalid(format!("empty list {text:?}")));
    }
    Ok(values)
}

/// Validated inputs of design, spectrum and baseline runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub band_limit: usize,
    pub constraints: usize,
    pub domain: DomainSpec,
    pub constraint_span: Option<String>,
    /// `"fast"` or the digit count.
    pub precision: String,
    pub method: MethodArg,
    pub seed: u64,
    pub format: Format,
    pub samples: usize,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<(Self, Precision), CliError> {
        let prec = parse_precision(&args.output.precision)?;
        if args.band_limit < 1 {
            return Err(CliError::Invalid("band limit N must be >= 1".into()));
        }
        if args.constraints < 1 {
            return Err(CliError::Invalid("constraint count M must be >= 1".into()));
        }
        if args.constraints > args.band_limit + 1 {
            return Err(superosc::Error::TooManyConstraints {
                constraints: args.constraints,
                band_limit: args.band_limit,
            }
            .into());
        }
        if args.samples == 1 {
            return Err(CliError::Invalid("--samples must be 0 or >= 2".into()));
        }
        let config = RunConfig {
            band_limit: args.band_limit,
            constraints: args.constraints,
            domain: DomainSpec::from_args(args)?,
            constraint_span: args.constraint_span.clone(),
            precision: precision_label(prec),
            method: args.method,
            seed: args.seed,
            format: args.output.format,
            samples: args.samples,
        };
        Ok((config, prec))
    }
}

pub fn precision_label(prec: Precision) -> String {
    if prec.is_fast() {
        "fast".into()
    } else {
        prec.digits().to_string()
    }
}
