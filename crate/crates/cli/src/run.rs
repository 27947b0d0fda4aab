//! Command implementations and output assembly.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use superosc::{
    fk_min_energy_signal, monotonicity_table, parse_real, scaling_sweep, slepian_modes, solve, yield_of,
    zero_crossings_with, Domain, Execution, FourierCosineSignal, MpReal, Precision, Problem, Real, Solution,
    SweepTable,
};

use crate::config::{
    parse_list, parse_precision, parse_span, precision_label, CommandArgs, CommonArgs, Format, OutputArgs, RunConfig,
    SweepArgs,
};
use crate::document::{
    BaselineReport, Command, ConfigEcho, Diagnostics, FailureReport, MethodDelta, ModeReport, ResultDocument,
    RootReport, Series, SlopeReport, SweepConfig, SweepKind, SweepReport, SweepRowReport, ViolationReport,
};
use crate::error::CliError;

/// Crossing-count grid density per radian of domain measure.
const CROSSING_POINTS_PER_UNIT: f64 = 1e5;

/// A finished run: the document plus the exit status it implies.
#[derive(Debug)]
pub struct Outcome {
    pub document: ResultDocument,
    /// 0, or 3 when a sweep recorded solver failures.
    pub exit_code: i32,
}

/// Runs one parsed command and writes its output.
pub fn execute(command: &CommandArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let (outcome, output) = match command {
        CommandArgs::Design(args) => (run_common(Command::Design, args)?, &args.output),
        CommandArgs::Spectrum(args) => (run_common(Command::Spectrum, args)?, &args.output),
        CommandArgs::Baseline(args) => (run_common(Command::Baseline, args)?, &args.output),
        CommandArgs::Sweep(args) => (run_sweep(args)?, &args.output),
    };
    let mut outcome = outcome;
    if output.timing {
        outcome.document.diagnostics.elapsed_ms = Some(started.elapsed().as_millis() as u64);
    }
    emit(&outcome.document, output)?;
    Ok(outcome)
}

fn run_common(command: Command, args: &CommonArgs) -> Result<Outcome, CliError> {
    let (config, prec) = RunConfig::from_args(args)?;
    let document = if prec.is_fast() {
        build_document::<f64>(command, &config, prec)?
    } else {
        build_document::<MpReal>(command, &config, prec)?
    };
    Ok(Outcome { document, exit_code: 0 })
}

/// Builds the design, spectrum or baseline document at scalar type `R`.
pub fn build_document<R: Real>(
    command: Command,
    config: &RunConfig,
    prec: Precision,
) -> Result<ResultDocument, CliError> {
    let domain: Domain<R> = config.domain.build(prec)?;
    let span = config.constraint_span.as_deref().map(|s| parse_span::<R>(s, prec)).transpose()?;
    let problem = Problem::alternating(config.band_limit, config.constraints, domain, span, config.seed, prec)?;
    let method = match command {
        Command::Baseline => superosc::SolveMethod::Secular,
        _ => config.method.into(),
    };
    let sol = solve(&problem, method)?;
    let count = sol.spectrum.len();
    if count == 0 {
        return Err(superosc::Error::SolverFailure("empty spectrum".into()).into());
    }

    let indices: Vec<usize> = match command {
        Command::Spectrum => (0..count).collect(),
        _ => vec![count - 1],
    };
    let roots = indices.iter().map(|&i| root_report(&problem, &sol, i, prec)).collect::<Result<Vec<_>, _>>()?;

    let series = if config.samples >= 2 && command != Command::Baseline {
        let mut out = Vec::new();
        for &i in &indices {
            out.extend(signal_series(&sol.spectrum.signals[i], i + 1, &problem.domain, config.samples, prec)?);
        }
        out
    } else {
        Vec::new()
    };

    let cross_method = sol.cross_check.as_ref().zip(sol.method_deltas()).map(|(check, deltas)| {
        sol.spectrum
            .eigenvalues
            .iter()
            .zip(&check.eigenvalues)
            .zip(deltas)
            .enumerate()
            .map(|(i, ((s, p), d))| MethodDelta {
                index: i + 1,
                secular: s.to_decimal(),
                polynomial: p.to_decimal(),
                relative_delta: d,
            })
            .collect()
    });

    let baseline = if command == Command::Baseline { Some(baseline_report(&problem, &sol, prec)?) } else { None };

    let mut warnings = Vec::new();
    if sol.removed_constraints > 0 {
        warnings.push(format!("{} linearly dependent constraints removed", sol.removed_constraints));
    }
    warnings.extend(sol.spectrum.warnings.iter().cloned());
    if let Some(check) = &sol.cross_check {
        warnings.extend(check.warnings.iter().map(|w| format!("polynomial path: {w}")));
    }

    Ok(ResultDocument {
        command,
        config: ConfigEcho::Run(config.clone()),
        roots,
        eigenvalue_count: count,
        cross_method,
        baseline,
        sweep: None,
        series,
        diagnostics: Diagnostics {
            seed: config.seed,
            precision: config.precision.clone(),
            method: Some(config.method),
            removed_constraints: sol.removed_constraints,
            warnings,
            elapsed_ms: None,
        },
    })
}

fn crossing_grid<R: Real>(domain: &Domain<R>) -> usize {
    ((CROSSING_POINTS_PER_UNIT * domain.measure().to_f64()).round() as usize).max(1000)
}

fn root_report<R: Real>(
    problem: &Problem<R>,
    sol: &Solution<R>,
    i: usize,
    prec: Precision,
) -> Result<RootReport, CliError> {
    let signal = &sol.spectrum.signals[i];
    let yields = yield_of(signal, &problem.domain, Some(&sol.overlap), prec)?;
    let crossings = zero_crossings_with(signal, &problem.domain, crossing_grid(&problem.domain), Execution::default())?;
    let diag = &sol.spectrum.diagnostics[i];
    Ok(RootReport {
        index: i + 1,
        eigenvalue: sol.spectrum.eigenvalues[i].to_decimal(),
        coefficients: decimals(signal.coeffs()),
        yield_algebraic: yields.algebraic.to_decimal(),
        yield_quadrature: yields.quadrature.to_decimal(),
        crossings,
        energy: signal.energy_per_period().to_decimal(),
        constraint_residual: sol.constraint_residuals[i],
        secular_residual: diag.secular_residual,
        stationarity_residual: diag.stationarity_residual,
        deflated: diag.deflated,
    })
}

fn baseline_report<R: Real>(
    problem: &Problem<R>,
    sol: &Solution<R>,
    prec: Precision,
) -> Result<BaselineReport, CliError> {
    let fk = fk_min_energy_signal(&sol.frame);
    let fk_yield = yield_of(&fk, &problem.domain, Some(&sol.overlap), prec)?;
    let slepian = slepian_modes(&sol.overlap, prec)?
        .into_iter()
        .map(|(value, mode)| ModeReport { eigenvalue: value.to_decimal(), coefficients: decimals(mode.coeffs()) })
        .collect();
    Ok(BaselineReport {
        fk_energy: fk.energy_per_period().to_decimal(),
        mu_tilde_energy: sol.frame.mu_tilde_energy().to_decimal(),
        fk_yield: fk_yield.algebraic.to_decimal(),
        fk_coefficients: decimals(fk.coeffs()),
        lambda_max: sol.spectrum.max_eigenvalue().to_decimal(),
        optimal_energy: sol.spectrum.top_signal().energy_per_period().to_decimal(),
        slepian,
    })
}

fn decimals<R: Real>(values: &[R]) -> Vec<String> {
    values.iter().map(Real::to_decimal).collect()
}

/// Samples over the full period and over the hull of the domain.
fn signal_series<R: Real>(
    signal: &FourierCosineSignal<R>,
    index: usize,
    domain: &Domain<R>,
    samples: usize,
    prec: Precision,
) -> Result<Vec<Series>, CliError> {
    let pi = R::pi(prec);
    let (lo, hi) = domain.hull();
    let ranges = [("period", -pi.clone(), pi), ("domain", lo, hi)];
    let mut out = Vec::new();
    for (label, lo, hi) in ranges {
        let points = signal.sample(&lo, &hi, samples)?;
        let mut series = Series {
            index,
            range: label.into(),
            t: Vec::with_capacity(samples),
            value: Vec::with_capacity(samples),
            log10_abs: Vec::with_capacity(samples),
        };
        for (t, f) in points {
            series.t.push(t.to_f64());
            series.value.push(f.to_f64());
            series.log10_abs.push(if f.is_zero() {
                None
            } else {
                Some(f.abs().ln().to_f64() / std::f64::consts::LN_10)
            });
        }
        out.push(series);
    }
    Ok(out)
}

fn run_sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let prec = parse_precision(&args.output.precision)?;
    if args.band_limit < 1 {
        return Err(CliError::Invalid("band limit N must be >= 1".into()));
    }
    let document =
        if prec.is_fast() { sweep_document::<f64>(args, prec)? } else { sweep_document::<MpReal>(args, prec)? };
    let failed = document.sweep.as_ref().is_some_and(|s| !s.failures.is_empty());
    Ok(Outcome { document, exit_code: if failed { 3 } else { 0 } })
}

/// Builds the sweep document at scalar type `R`.
pub fn sweep_document<R: Real>(args: &SweepArgs, prec: Precision) -> Result<ResultDocument, CliError> {
    let n = args.band_limit;
    let exec = Execution::default();
    let (kind, table, config) = match (&args.a_values, &args.m_values) {
        (Some(list), None) => {
            let m = args.constraints.ok_or_else(|| CliError::Invalid("a scaling sweep needs --constraints".into()))?;
            if args.interval.is_some() {
                return Err(CliError::Invalid("--interval belongs to a monotonicity sweep (--m-values)".into()));
            }
            if m < 1 {
                return Err(CliError::Invalid("constraint count M must be >= 1".into()));
            }
            if m > n + 1 {
                return Err(superosc::Error::TooManyConstraints { constraints: m, band_limit: n }.into());
            }
            let texts = parse_list(list, |s| Ok(s.to_string()))?;
            let a_values = texts.iter().map(|s| parse_real::<R>(s, prec)).collect::<Result<Vec<R>, _>>()?;
            let table = scaling_sweep(n, m, &a_values, prec, exec)?;
            let config = SweepConfig {
                band_limit: n,
                constraints: Some(m),
                a_values: Some(texts),
                m_values: None,
                interval: None,
                precision: precision_label(prec),
            };
            (SweepKind::Scaling, table, config)
        }
        (None, Some(list)) => {
            let a_text = args
                .interval
                .clone()
                .ok_or_else(|| CliError::Invalid("a monotonicity sweep needs --interval".into()))?;
            if args.constraints.is_some() {
                return Err(CliError::Invalid("--constraints belongs to a scaling sweep (--a-values)".into()));
            }
            let m_values = parse_list(list, |s| {
                s.parse::<usize>().map_err(|_| CliError::Invalid(format!("bad constraint count {s:?}")))
            })?;
            let a = parse_real::<R>(&a_text, prec)?;
            let table = monotonicity_table(n, &a, &m_values, prec, exec)?;
            let config = SweepConfig {
                band_limit: n,
                constraints: None,
                a_values: None,
                m_values: Some(m_values),
                interval: Some(a_text),
                precision: precision_label(prec),
            };
            (SweepKind::Monotonicity, table, config)
        }
        _ => return Err(CliError::Invalid("give exactly one of --a-values or --m-values".into())),
    };
    let report = sweep_report(kind, &table);
    let warnings = report.failures.iter().map(|f| format!("a = {}, M = {}: {}", f.a, f.m, f.message)).collect();
    Ok(ResultDocument {
        command: Command::Sweep,
        config: ConfigEcho::Sweep(config),
        roots: Vec::new(),
        eigenvalue_count: report.rows.iter().map(|r| r.index).max().unwrap_or(0),
        cross_method: None,
        baseline: None,
        sweep: Some(report),
        series: Vec::new(),
        diagnostics: Diagnostics {
            seed: 0,
            precision: precision_label(prec),
            method: None,
            removed_constraints: 0,
            warnings,
            elapsed_ms: None,
        },
    })
}

fn sweep_report<R: Real>(kind: SweepKind, table: &SweepTable<R>) -> SweepReport {
    let violations = match kind {
        SweepKind::Monotonicity => table
            .monotonicity_violations()
            .into_iter()
            .map(|v| ViolationReport {
                index: v.index,
                m_low: v.m_low,
                m_high: v.m_high,
                value_low: v.value_low.to_decimal(),
                value_high: v.value_high.to_decimal(),
            })
            .collect(),
        SweepKind::Scaling => Vec::new(),
    };
    SweepReport {
        kind,
        rows: table
            .rows
            .iter()
            .map(|r| SweepRowReport {
                a: r.a.to_decimal(),
                m: r.m,
                index: r.index,
                eigenvalue: r.eigenvalue.to_decimal(),
                normalized: r.normalized.as_ref().map(Real::to_decimal),
            })
            .collect(),
        slopes: table
            .slopes
            .iter()
            .map(|s| SlopeReport {
                index: s.index,
                slope: s.slope,
                expected: s.expected,
                relative_error: s.relative_error(),
            })
            .collect(),
        violations,
        failures: table.failures.iter().map(|f| FailureReport { a: f.a, m: f.m, message: f.message.clone() }).collect(),
    }
}

/// Writes the document to stdout or `--out`; CSV runs with `--out` also get
/// one `<stem>_series_<index>.csv` file per sampled eigenvalue.
pub fn emit(document: &ResultDocument, output: &OutputArgs) -> Result<(), CliError> {
    let text = match output.format {
        Format::Json => document.to_json()?,
        Format::Csv => document.to_csv()?,
    };
    match &output.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
        Some(path) => {
            std::fs::write(path, text)?;
            if output.format == Format::Csv {
                write_series_files(document, path)?;
            }
        }
    }
    Ok(())
}

fn write_series_files(document: &ResultDocument, path: &Path) -> Result<(), CliError> {
    let mut indices: Vec<usize> = document.series.iter().map(|s| s.index).collect();
    indices.dedup();
    for index in indices {
        let mut text = String::new();
        for (k, series) in document.series.iter().filter(|s| s.index == index).enumerate() {
            let csv = series.to_csv()?;
            // keep a single header per file
            text.push_str(if k == 0 { &csv } else { csv.split_once('\n').map_or("", |(_, rest)| rest) });
        }
        std::fs::write(series_path(path, index), text)?;
    }
    Ok(())
}

pub fn series_path(out: &Path, index: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "superosc".into());
    out.with_file_name(format!("{stem}_series_{index}.csv"))
}
