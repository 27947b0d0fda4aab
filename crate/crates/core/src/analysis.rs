//! Yields, oscillation counts and the parameter sweeps built on the solver.

use crate::domain::{overlap_matrix, Domain, OverlapMatrix};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::problem::{solve, Problem, SolveMethod};
use crate::quadrature::default_rule;
use crate::real::{Precision, Real};
use crate::signal::FourierCosineSignal;

/// Yield computed two independent ways.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldReport<R> {
    /// `AᵀΔA / AᵀA`.
    pub algebraic: R,
    /// `∫_D f² / ∫_{-π}^{π} f²` by adaptive quadrature.
    pub quadrature: R,
}

impl<R: Real> YieldReport<R> {
    pub fn relative_gap(&self) -> f64 {
        ((self.algebraic.clone() - &self.quadrature).abs() / self.algebraic.abs()).to_f64()
    }
}

pub fn yield_of<R: Real>(
    signal: &FourierCosineSignal<R>,
    domain: &Domain<R>,
    delta: Option<&OverlapMatrix<R>>,
    prec: Precision,
) -> Result<YieldReport<R>> {
    let energy = signal.energy_per_period();
    if energy.is_zero() {
        return Err(Error::InvalidArgument("yield of the zero signal is undefined".into()));
    }
    let built;
    let delta = match delta {
        Some(d) => {
            if d.band_limit() != signal.band_limit() || d.domain() != domain {
                return Err(Error::InvalidArgument("overlap matrix does not match the signal and domain".into()));
            }
            d
        }
        None => {
            built = overlap_matrix(domain, signal.band_limit(), prec)?;
            &built
        }
    };
    let algebraic = delta.energy_inside(signal.coeffs()) / &energy;

    let (rule, rel_tol) = default_rule::<R>(prec);
    let square = |t: &R| signal.evaluate(t).square();
    let mut inside = R::zero(prec);
    for (lo, hi) in domain.intervals() {
        inside += rule.integrate_adaptive(&square, lo, hi, rel_tol, 0.0)?;
    }
    let pi = R::pi(prec);
    let total = rule.integrate_adaptive(&square, &-pi.clone(), &pi, rel_tol, 0.0)?;
    Ok(YieldReport { algebraic, quadrature: inside / total })
}

/// Sign of `f(t)` using a cheap `f64` evaluation when it is provably
/// decisive and the full-precision evaluation otherwise.
struct SignProbe<'a, R> {
    exact: &'a FourierCosineSignal<R>,
    fast: Vec<f64>,
    abs_coeffs: Vec<f64>,
}

impl<'a, R: Real> SignProbe<'a, R> {
    fn new(exact: &'a FourierCosineSignal<R>) -> Self {
        let fast = exact.coeffs().iter().map(Real::to_f64).collect::<Vec<_>>();
        let abs_coeffs = fast.iter().map(|a| a.abs()).collect();
        SignProbe { exact, fast, abs_coeffs }
    }

    fn sign(&self, t: f64, exact_t: impl FnOnce() -> R) -> i8 {
        use std::f64::consts::PI;
        let mut acc = self.fast[0] / (2.0 * PI).sqrt();
        let mut bound = self.abs_coeffs[0];
        for m in 1..self.fast.len() {
            let mt = m as f64 * t;
            acc += self.fast[m] * mt.cos() / PI.sqrt();
            bound += self.abs_coeffs[m] * (1.0 + mt.abs());
        }
        // rounding of coefficients, arguments, cosines and the sum
        let bound = 16.0 * self.fast.len() as f64 * f64::EPSILON * bound;
        if acc.abs() > bound {
            return if acc > 0.0 { 1 } else { -1 };
        }
        let value = self.exact.evaluate(&exact_t());
        if value.is_zero() {
            0
        } else if value > value.lit(0.0) {
            1
        } else {
            -1
        }
    }
}

/// Counts sign changes of `f` on a uniform grid over each interval of the
/// domain; `grid_points` are shared among intervals in proportion to their
/// length. A run of exact zeros counts as one crossing.
pub fn zero_crossings<R: Real>(
    signal: &FourierCosineSignal<R>,
    domain: &Domain<R>,
    grid_points: usize,
) -> Result<usize> {
    zero_crossings_with(signal, domain, grid_points, Execution::default())
}

pub fn zero_crossings_with<R: Real>(
    signal: &FourierCosineSignal<R>,
    domain: &Domain<R>,
    grid_points: usize,
    exec: Execution,
) -> Result<usize> {
    if grid_points < 1000 {
        return Err(Error::InvalidArgument(format!("grid needs at least 1000 points, got {grid_points}")));
    }
    let probe = SignProbe::new(signal);
    let total = domain.measure().to_f64();
    let mut crossings = 0;
    for (lo, hi) in domain.intervals() {
        let width = hi.clone() - lo;
        let points = ((grid_points as f64 * width.to_f64() / total).round() as usize).max(2);
        let last = lo.lit((points - 1) as f64);
        let (lo_f, width_f) = (lo.to_f64(), width.to_f64());
        let signs = exec.map_range(points, |k| {
            let t = lo_f + width_f * k as f64 / (points - 1) as f64;
            probe.sign(t, || lo.clone() + width.clone() * lo.lit(k as f64) / &last)
        });
        crossings += count_sign_changes(&signs);
    }
    Ok(crossings)
}

fn count_sign_changes(signs: &[i8]) -> usize {
    let mut count = 0;
    let mut previous = 0i8;
    let mut in_zero_run = false;
    for &s in signs {
        if s == 0 {
            if !in_zero_run {
                count += 1;
                in_zero_run = true;
            }
            continue;
        }
        if previous != 0 && s != previous && !in_zero_run {
            count += 1;
        }
        in_zero_run = false;
        previous = s;
    }
    count
}

/// One eigenvalue of one solved instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<R> {
    pub a: R,
    pub m: usize,
    /// 1-based, ascending eigenvalue index.
    pub index: usize,
    pub eigenvalue: R,
    /// `λ_i / a^{4(N-i)+5}` for scaling sweeps.
    pub normalized: Option<R>,
}

/// Least-squares slope of `ln λ_i` against `ln a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub index: usize,
    pub slope: f64,
    /// `4(N-i)+5`.
    pub expected: f64,
}

impl SlopeFit {
    pub fn relative_error(&self) -> f64 {
        (self.slope - self.expected).abs() / self.expected.abs()
    }
}

/// An instance of the grid whose solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub a: f64,
    pub m: usize,
    pub message: String,
}

/// `λ_i(M) < λ_i(M')` although `M < M'`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation<R> {
    pub index: usize,
    pub m_low: usize,
    pub m_high: usize,
    pub value_low: R,
    pub value_high: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<R> {
    pub band_limit: usize,
    /// Ordered by `(a, m, index)` in grid order.
    pub rows: Vec<SweepRow<R>>,
    pub slopes: Vec<SlopeFit>,
    pub failures: Vec<SweepFailure>,
}

impl<R: Real> SweepTable<R> {
    /// Ascending spectrum for the given `m` (first matching `a`).
    pub fn spectrum_for(&self, m: usize) -> Vec<&R> {
        let first_a = self.rows.iter().find(|r| r.m == m).map(|r| r.a.clone());
        self.rows.iter().filter(|r| r.m == m && Some(&r.a) == first_a.as_ref()).map(|r| &r.eigenvalue).collect()
    }

    /// Every shared index at which a larger `M` gives a larger eigenvalue.
    pub fn monotonicity_violations(&self) -> Vec<MonotonicityViolation<R>> {
        let mut ms: Vec<usize> = self.rows.iter().map(|r| r.m).collect();
        ms.sort_unstable();
        ms.dedup();
        let mut out = Vec::new();
        for (x, &m_low) in ms.iter().enumerate() {
            for &m_high in &ms[x + 1..] {
                let low = self.spectrum_for(m_low);
                let high = self.spectrum_for(m_high);
                for (i, (a, b)) in low.iter().zip(&high).enumerate() {
                    if a < b {
                        out.push(MonotonicityViolation {
                            index: i + 1,
                            m_low,
                            m_high,
                            value_low: (*a).clone(),
                            value_high: (*b).clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

fn scaling_exponent(n: usize, index: usize) -> i32 {
    4 * (n as i32 - index as i32) + 5
}

/// Solves the single-interval problem at each `a` and fits the log-log slope
/// of every eigenvalue index.
pub fn scaling_sweep<R: Real>(
    n: usize,
    m: usize,
    a_values: &[R],
    prec: Precision,
    exec: Execution,
) -> Result<SweepTable<R>> {
    if a_values.is_empty() {
        return Err(Error::InvalidArgument("scaling sweep needs at least one a value".into()));
    }
    let pi = R::pi(prec);
    for a in a_values {
        if *a <= R::zero(prec) || *a >= pi {
            return Err(Error::InvalidArgument(format!("a = {a} is outside (0, π)")));
        }
    }
    let min_a = a_values.iter().map(Real::to_f64).fold(f64::INFINITY, f64::min);
    if prec.is_fast() && min_a < 0.1 {
        return Err(Error::InvalidArgument("a < 0.1 needs a high-precision context".into()));
    }
    let results = exec
        .map(a_values, |a| Problem::interval(n, m, a.clone(), 0, prec).and_then(|p| solve(&p, SolveMethod::Secular)));

    let mut table = SweepTable { band_limit: n, rows: Vec::new(), slopes: Vec::new(), failures: Vec::new() };
    for (a, result) in a_values.iter().zip(results) {
        match result {
            Ok(sol) => {
                for (i, y) in sol.spectrum.eigenvalues.iter().enumerate() {
                    let index = i + 1;
                    let normalized = y.clone() / a.powi(scaling_exponent(n, index));
                    table.rows.push(SweepRow {
                        a: a.clone(),
                        m,
                        index,
                        eigenvalue: y.clone(),
                        normalized: Some(normalized),
                    });
                }
            }
            Err(e) => table.failures.push(SweepFailure { a: a.to_f64(), m, message: e.to_string() }),
        }
    }

    let count = n + 2 - m.min(n + 1);
    for index in 1..=count {
        let points: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r.index == index)
            .map(|r| (r.a.ln().to_f64(), r.eigenvalue.abs().ln().to_f64()))
            .collect();
        if let Some(slope) = least_squares_slope(&points) {
            table.slopes.push(SlopeFit { index, slope, expected: f64::from(scaling_exponent(n, index)) });
        }
    }
    Ok(table)
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Spectra for several constraint counts at a fixed single interval.
pub fn monotonicity_table<R: Real>(
    n: usize,
    a: &R,
    m_values: &[usize],
    prec: Precision,
    exec: Execution,
) -> Result<SweepTable<R>> {
    if m_values.is_empty() {
        return Err(Error::InvalidArgument("monotonicity table needs at least one M".into()));
    }
    if let Some(&m) = m_values.iter().find(|&&m| m > n + 1 || m == 0) {
        if m == 0 {
            return Err(Error::InvalidArgument("M must be >= 1".into()));
        }
        return Err(Error::TooManyConstraints { constraints: m, band_limit: n });
    }
    let results = exec
        .map(m_values, |&m| Problem::interval(n, m, a.clone(), 0, prec).and_then(|p| solve(&p, SolveMethod::Secular)));
    let mut table = SweepTable { band_limit: n, rows: Vec::new(), slopes: Vec::new(), failures: Vec::new() };
    for (&m, result) in m_values.iter().zip(results) {
        match result {
            Ok(sol) => {
                for (i, y) in sol.spectrum.eigenvalues.iter().enumerate() {
                    table.rows.push(SweepRow {
                        a: a.clone(),
                        m,
                        index: i + 1,
                        eigenvalue: y.clone(),
                        normalized: None,
                    });
                }
            }
            Err(e) => table.failures.push(SweepFailure { a: a.to_f64(), m, message: e.to_string() }),
        }
    }
    Ok(table)
}
