//! End-to-end pipeline: domain and constraints in, spectrum out.

use crate::constraints::{
    alternating_constraints, constraint_matrix, orthonormal_frame, reduce_rank, ConstraintMatrix, ConstraintSet,
    RotatedFrame,
};
use crate::domain::{overlap_matrix, Domain, OverlapMatrix};
use crate::error::{Error, Result};
use crate::real::{Precision, Real};
use crate::spectrum::{
    polynomial_spectrum, rotate_and_partition, secular_spectrum, BlockDecomposition, GeneralizedSpectrum,
};

/// Which eigenvalue equation(s) to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SolveMethod {
    #[default]
    Secular,
    Polynomial,
    /// Secular as primary, polynomial as cross-check.
    Both,
}

/// One yield-maximization instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<R> {
    pub band_limit: usize,
    pub domain: Domain<R>,
    pub constraints: ConstraintSet<R>,
    pub seed: u64,
    pub precision: Precision,
}

impl<R: Real> Problem<R> {
    /// `m` alternating constraints spread over `span`, or over the domain's
    /// default constraint span when `span` is `None`.
    pub fn alternating(
        band_limit: usize,
        m: usize,
        domain: Domain<R>,
        span: Option<(R, R)>,
        seed: u64,
        precision: Precision,
    ) -> Result<Self> {
        if band_limit < 1 {
            return Err(Error::InvalidArgument("band limit must be >= 1".into()));
        }
        if m > band_limit + 1 {
            return Err(Error::TooManyConstraints { constraints: m, band_limit });
        }
        let (lo, hi) = span.unwrap_or_else(|| domain.constraint_span());
        let constraints = alternating_constraints(&lo, &hi, m)?;
        Ok(Problem { band_limit, domain, constraints, seed, precision })
    }

    /// The single symmetric interval `(-a, a)` with constraints on `[0, a)`.
    pub fn interval(band_limit: usize, m: usize, a: R, seed: u64, precision: Precision) -> Result<Self> {
        let domain = Domain::interval(a, precision)?;
        Self::alternating(band_limit, m, domain, None, seed, precision)
    }
}

/// Everything computed for one problem.
#[derive(Debug, Clone)]
pub struct Solution<R> {
    pub overlap: OverlapMatrix<R>,
    pub constraint_matrix: ConstraintMatrix<R>,
    /// Constraint values kept after rank reduction.
    pub values: Vec<R>,
    pub removed_constraints: usize,
    pub frame: RotatedFrame<R>,
    pub blocks: BlockDecomposition<R>,
    /// Spectrum from the requested method (secular when both were run).
    pub spectrum: GeneralizedSpectrum<R>,
    /// Polynomial spectrum when both methods were requested.
    pub cross_check: Option<GeneralizedSpectrum<R>>,
    /// Largest `|f(t_j) - μ_j|` over the original constraints, per signal.
    pub constraint_residuals: Vec<f64>,
}

impl<R: Real> Solution<R> {
    /// Per-root `|λ_secular - λ_polynomial| / |λ_secular|`.
    pub fn method_deltas(&self) -> Option<Vec<f64>> {
        self.cross_check.as_ref().and_then(|other| self.spectrum.relative_differences(other))
    }
}

pub fn solve<R: Real>(problem: &Problem<R>, method: SolveMethod) -> Result<Solution<R>> {
    let prec = problem.precision;
    let n = problem.band_limit;
    let m = problem.constraints.len();
    if m > n + 1 {
        return Err(Error::TooManyConstraints { constraints: m, band_limit: n });
    }
    let overlap = overlap_matrix(&problem.domain, n, prec)?;
    let full = constraint_matrix(&problem.constraints, n, prec)?;
    let (cm, values) = reduce_rank(&full, problem.constraints.values(), prec.rank_tolerance(), prec)?;
    let removed_constraints = m - cm.len();
    let frame = orthonormal_frame(&cm, &values, problem.seed, prec)?;
    let blocks = rotate_and_partition(&overlap, &frame)?;
    let (spectrum, cross_check) = match method {
        SolveMethod::Secular => (secular_spectrum(&blocks, &frame, prec)?, None),
        SolveMethod::Polynomial => (polynomial_spectrum(&blocks, &frame, prec)?, None),
        SolveMethod::Both => {
            let primary = secular_spectrum(&blocks, &frame, prec)?;
            let check = polynomial_spectrum(&blocks, &frame, prec)?;
            (primary, Some(check))
        }
    };
    let constraint_residuals = spectrum
        .signals
        .iter()
        .map(|s| {
            problem
                .constraints
                .points()
                .iter()
                .zip(problem.constraints.values())
                .map(|(t, mu)| (s.evaluate(t) - mu).abs().to_f64())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(Solution {
        overlap,
        constraint_matrix: cm,
        values,
        removed_constraints,
        frame,
        blocks,
        spectrum,
        cross_check,
        constraint_residuals,
    })
}
