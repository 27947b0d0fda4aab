//! Band-limited even periodic signals in the orthonormal cosine basis
//! `{1/√(2π), cos(mt)/√π}`.

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCosineSignal<R> {
    coeffs: Vec<R>,
}

impl<R: Real> FourierCosineSignal<R> {
    /// `coeffs = (A_0, …, A_N)`; the band limit is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<R>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a signal needs band limit N >= 1 (got {} coefficients)",
                coeffs.len()
            )));
        }
        if let Some(m) = coeffs.iter().position(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("coefficient A_{m} is not finite")));
        }
        Ok(FourierCosineSignal { coeffs })
    }

    pub fn zero(band_limit: usize, prec: Precision) -> Self {
        FourierCosineSignal { coeffs: vec![R::zero(prec); band_limit + 1] }
    }

    /// The signal whose only non-zero coefficient is `A_m = value`.
    pub fn harmonic(band_limit: usize, m: usize, value: R, prec: Precision) -> Self {
        let mut s = Self::zero(band_limit, prec);
        s.coeffs[m] = value;
        s
    }

    pub fn band_limit(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// `A_0/√(2π) + Σ A_m cos(mt)/√π`, summed directly.
    pub fn evaluate(&self, t: &R) -> R {
        let pi = t.pi_like();
        let two = t.lit(2.0);
        let mut harmonics = t.lit(0.0);
        for (m, a) in self.coeffs.iter().enumerate().skip(1) {
            let mt = t.clone() * t.lit(m as f64);
            harmonics += a.clone() * mt.cos();
        }
        self.coeffs[0].clone() / (two * &pi).sqrt() + harmonics / pi.sqrt()
    }

    /// Energy per period `Σ A_m²`, equal to `∫_{-π}^{π} f²` by orthonormality.
    pub fn energy_per_period(&self) -> R {
        let mut acc = self.coeffs[0].square();
        for a in &self.coeffs[1..] {
            acc += a.square();
        }
        acc
    }

    /// `count` uniformly spaced samples on `[lo, hi]`, endpoints included.
    pub fn sample(&self, lo: &R, hi: &R, count: usize) -> Result<Vec<(R, R)>> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!("sample count must be >= 2, got {count}")));
        }
        if lo >= hi {
            return Err(Error::InvalidArgument("sample range needs lo < hi".into()));
        }
        let span = hi.clone() - lo;
        let last = lo.lit((count - 1) as f64);
        Ok((0..count)
            .map(|k| {
                let t = if k + 1 == count { hi.clone() } else { lo.clone() + span.clone() * lo.lit(k as f64) / &last };
                let f = self.evaluate(&t);
                (t, f)
            })
            .collect())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: &R, other: &Self, beta: &R) -> Self {
        assert_eq!(self.band_limit(), other.band_limit(), "band limits differ");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| alpha.clone() * a + beta.clone() * b).collect();
        FourierCosineSignal { coeffs }
    }

    pub fn to_f64(&self) -> FourierCosineSignal<f64> {
        FourierCosineSignal { coeffs: self.coeffs.iter().map(Real::to_f64).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn constant_one() -> FourierCosineSignal<f64> {
        FourierCosineSignal::harmonic(4, 0, (2.0 * PI).sqrt(), Precision::FAST)
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(FourierCosineSignal::new(vec![1.0]).is_err());
        assert!(FourierCosineSignal::new(vec![1.0, f64::NAN]).is_err());
        assert!(FourierCosineSignal::new(vec![1.0, 0.0]).is_ok());
    }

    #[test]
    fn constant_signal_evaluates_to_one() {
        assert!((constant_one().evaluate(&1.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_harmonic_values() {
        let s = FourierCosineSignal::harmonic(8, 5, PI.sqrt(), Precision::FAST);
        assert!((s.evaluate(&0.0) - 1.0).abs() < 1e-15);
        assert!(s.evaluate(&(PI / 10.0)).abs() < 1e-15);
    }

    #[test]
    fn energy_of_unit_vectors_and_zero() {
        for m in 0..=6 {
            let s = FourierCosineSignal::harmonic(6, m, 1.0, Precision::FAST);
            assert_eq!(s.energy_per_period(), 1.0);
        }
        assert_eq!(FourierCosineSignal::<f64>::zero(6, Precision::FAST).energy_per_period(), 0.0);
    }

    #[test]
    fn sample_edge_cases() {
        let s = constant_one();
        let pts = s.sample(&-1.0, &2.0, 3).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|(_, f)| (f - pts[0].1).abs() < 1e-15));
        let ends = s.sample(&-1.0, &2.0, 2).unwrap();
        assert_eq!(ends[0].0, -1.0);
        assert_eq!(ends[1].0, 2.0);
        assert!(s.sample(&0.0, &1.0, 1).is_err());
        assert!(s.sample(&1.0, &0.0, 5).is_err());
    }

    #[test]
    fn sampled_maximum_of_single_harmonic() {
        let s = FourierCosineSignal::harmonic(5, 5, PI.sqrt(), Precision::FAST);
        let pts = s.sample(&-PI, &PI, 10001).unwrap();
        let max = pts.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-6);
    }
}
