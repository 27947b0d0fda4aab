//! Superoscillation domains and the closed-form overlap matrix Δ.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::{parse_real, Precision, Real};

/// Intervals whose endpoints lie this close are merged.
const TOUCH_TOLERANCE: f64 = 1e-15;

/// Ordered union of disjoint open subintervals of `(-π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain<R> {
    intervals: Vec<(R, R)>,
}

impl<R: Real> Domain<R> {
    /// Validates and canonicalizes: sorted ascending, touching intervals merged.
    pub fn new(intervals: Vec<(R, R)>, prec: Precision) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Domain("domain has no intervals".into()));
        }
        let pi = R::pi(prec);
        let slack = R::from_f64(TOUCH_TOLERANCE, prec);
        let mut clean = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Domain("interval endpoints must be finite".into()));
            }
            if lo >= hi {
                return Err(Error::Domain(format!("interval ({lo}, {hi}) is empty")));
            }
            let lo = if lo < -pi.clone() {
                if lo < -(pi.clone() + &slack) {
                    return Err(Error::Domain(format!("interval start {lo} lies below -π")));
                }
                -pi.clone()
            } else {
                lo
            };
            let hi = if hi > pi {
                if hi > pi.clone() + &slack {
                    return Err(Error::Domain(format!("interval end {hi} lies above π")));
                }
                pi.clone()
            } else {
                hi
            };
            clean.push((lo, hi));
        }
        clean.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite endpoints"));

        let mut merged: Vec<(R, R)> = Vec::with_capacity(clean.len());
        for (lo, hi) in clean {
            if let Some(last) = merged.last_mut() {
                let gap = lo.clone() - &last.1;
                if gap.abs() <= slack {
                    last.1 = hi;
                    continue;
                }
                if gap < R::zero(prec) {
                    return Err(Error::Domain(format!("intervals overlap: ({}, {}) and ({lo}, {hi})", last.0, last.1)));
                }
            }
            merged.push((lo, hi));
        }
        let domain = Domain { intervals: merged };
        if domain.measure() <= R::zero(prec) {
            return Err(Error::Domain("domain has zero measure".into()));
        }
        Ok(domain)
    }

    /// The full period `(-π, π)`.
    pub fn full(prec: Precision) -> Self {
        let pi = R::pi(prec);
        Domain { intervals: vec![(-pi.clone(), pi)] }
    }

    /// `(-a, a)` for `0 < a <= π`.
    pub fn interval(a: R, prec: Precision) -> Result<Self> {
        if a <= R::zero(prec) {
            return Err(Error::InvalidArgument(format!("interval half-width must be positive, got {a}")));
        }
        Self::new(vec![(-a.clone(), a)], prec)
    }

    pub fn intervals(&self) -> &[(R, R)] {
        &self.intervals
    }

    /// Vol(D).
    pub fn measure(&self) -> R {
        let mut it = self.intervals.iter().map(|(lo, hi)| hi.clone() - lo);
        let first = it.next().expect("non-empty domain");
        it.fold(first, |acc, x| acc + x)
    }

    /// Smallest interval containing the whole domain.
    pub fn hull(&self) -> (R, R) {
        (self.intervals[0].0.clone(), self.intervals[self.intervals.len() - 1].1.clone())
    }

    pub fn contains(&self, t: &R) -> bool {
        self.intervals.iter().any(|(lo, hi)| t > lo && t < hi)
    }

    /// True when `D = -D` up to the merge tolerance.
    pub fn is_symmetric(&self) -> bool {
        let k = self.intervals.len();
        (0..k).all(|i| {
            let (lo, hi) = &self.intervals[i];
            let (mlo, mhi) = &self.intervals[k - 1 - i];
            (lo.clone() + mhi).abs().to_f64() <= TOUCH_TOLERANCE && (hi.clone() + mlo).abs().to_f64() <= TOUCH_TOLERANCE
        })
    }

    /// Interval on which alternating constraints are placed by default: the
    /// non-negative part of the rightmost interval (or the whole rightmost
    /// interval when it lies left of the origin).
    pub fn constraint_span(&self) -> (R, R) {
        let (lo, hi) = self.intervals[self.intervals.len() - 1].clone();
        let zero = lo.lit(0.0);
        if hi > zero && lo < zero {
            (zero, hi)
        } else {
            (lo, hi)
        }
    }

    /// Parses `"lo,hi;lo,hi"`; endpoints accept `pi` forms and fractions.
    pub fn parse(text: &str, prec: Precision) -> Result<Self> {
        let mut intervals = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (lo, hi) = part
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("interval {part:?} is not of the form lo,hi")))?;
            intervals.push((parse_real(lo, prec)?, parse_real(hi, prec)?));
        }
        Self::new(intervals, prec)
    }

    pub fn to_f64(&self) -> Domain<f64> {
        Domain { intervals: self.intervals.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect() }
    }
}

impl<R: Real> fmt::Display for Domain<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "({}, {})", lo.to_f64(), hi.to_f64())?;
        }
        Ok(())
    }
}

/// `(-b, -a) ∪ (a, b)` for `0 <= a < b <= π`; `(-b, b)` when `a = 0`.
pub fn symmetrize_domain<R: Real>(a: R, b: R, prec: Precision) -> Result<Domain<R>> {
    let zero = R::zero(prec);
    if a < zero || b > R::pi(prec) {
        return Err(Error::InvalidArgument(format!("annulus needs 0 <= a < b <= π, got ({a}, {b})")));
    }
    if a >= b {
        return Err(Error::InvalidArgument(format!("annulus needs a < b, got ({a}, {b})")));
    }
    if a.is_zero() {
        return Domain::new(vec![(-b.clone(), b)], prec);
    }
    Domain::new(vec![(-b.clone(), -a.clone()), (a, b)], prec)
}

/// Gram matrix of the orthonormal cosine basis restricted to a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix<R> {
    band_limit: usize,
    entries: Matrix<R>,
    domain: Domain<R>,
}

impl<R: Real> OverlapMatrix<R> {
    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn entries(&self) -> &Matrix<R> {
        &self.entries
    }

    pub fn domain(&self) -> &Domain<R> {
        &self.domain
    }

    /// `Aᵀ Δ A`, the energy of the signal inside the domain.
    pub fn energy_inside(&self, coeffs: &[R]) -> R {
        self.entries.quadratic_form(coeffs)
    }
}

/// Builds Δ(D) for band limit `n` from closed-form antiderivatives of
/// `cos(mt) cos(nt)`, summed over the intervals of `domain`.
pub fn overlap_matrix<R: Real>(domain: &Domain<R>, n: usize, prec: Precision) -> Result<OverlapMatrix<R>> {
    if n < 1 {
        return Err(Error::InvalidArgument("band limit must be >= 1".into()));
    }
    let pi = R::pi(prec);
    let two = R::from_f64(2.0, prec);
    let inv_pi = R::one(prec) / &pi;
    let inv_sqrt2_pi = R::one(prec) / (two.clone().sqrt() * &pi);
    let mut delta = Matrix::zeros(n + 1, n + 1, prec);

    for (lo, hi) in domain.intervals() {
        // sin(k t) at both ends for k = 0..=2n
        let sines = |t: &R| -> Vec<R> { (0..=2 * n).map(|k| (t.clone() * R::from_usize(k, prec)).sin()).collect() };
        let (s_lo, s_hi) = (sines(lo), sines(hi));
        let diff = |k: usize| s_hi[k].clone() - &s_lo[k];
        let width = hi.clone() - lo;

        delta[(0, 0)] += width.clone() / (two.clone() * &pi);
        for k in 1..=n {
            let v = diff(k) / R::from_usize(k, prec) * &inv_sqrt2_pi;
            delta[(0, k)] += v.clone();
            delta[(k, 0)] += v;
        }
        for m in 1..=n {
            let fm = R::from_usize(m, prec);
            let diag = (width.clone() / &two + diff(2 * m) / (fm * R::from_f64(4.0, prec))) * &inv_pi;
            delta[(m, m)] += diag;
            for k in (m + 1)..=n {
                let d = R::from_usize(k - m, prec);
                let s = R::from_usize(k + m, prec);
                // sin((m-k)t) = -sin((k-m)t), and the 1/(m-k) factor flips back
                let v = (diff(k - m) / (two.clone() * d) + diff(k + m) / (two.clone() * s)) * &inv_pi;
                delta[(m, k)] += v.clone();
                delta[(k, m)] += v;
            }
        }
    }
    Ok(OverlapMatrix { band_limit: n, entries: delta, domain: domain.clone() })
}
