//! Adaptive composite Gauss–Legendre quadrature at the context precision.

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

#[derive(Debug, Clone)]
pub struct GaussLegendre<R> {
    nodes: Vec<R>,
    weights: Vec<R>,
}

impl<R: Real> GaussLegendre<R> {
    /// `n`-point rule on `[-1, 1]`; nodes by Newton iteration on `P_n`.
    pub fn new(n: usize, prec: Precision) -> Self {
        assert!(n >= 2);
        let one = R::one(prec);
        let two = R::from_f64(2.0, prec);
        let tol = R::from_f64(prec.epsilon() * 4.0, prec);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = R::from_f64(guess, prec);
            let mut dp = one.clone();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, &x, &one);
                let dx = p / &d;
                x -= &dx;
                dp = d;
                if dx.abs() <= tol {
                    let (_, d) = legendre_with_derivative(n, &x, &one);
                    dp = d;
                    break;
                }
            }
            let w = two.clone() / ((one.clone() - x.square()) * dp.square());
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fixed rule on `[lo, hi]`.
    pub fn integrate<F: Fn(&R) -> R>(&self, f: &F, lo: &R, hi: &R) -> R {
        let two = lo.lit(2.0);
        let half = (hi.clone() - lo) / &two;
        let mid = (hi.clone() + lo) / two;
        let mut acc = lo.lit(0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid.clone() + half.clone() * x;
            acc += w.clone() * f(&t);
        }
        acc * half
    }

    /// Bisects panels until the one-panel and two-panel estimates agree to
    /// `rel_tol` relative (or `abs_floor` absolute).
    pub fn integrate_adaptive<F: Fn(&R) -> R>(&self, f: &F, lo: &R, hi: &R, rel_tol: f64, abs_floor: f64) -> Result<R> {
        const MAX_PANELS: usize = 1 << 16;
        let two = lo.lit(2.0);
        let mut total = lo.lit(0.0);
        let mut stack = vec![(lo.clone(), hi.clone(), self.integrate(f, lo, hi), 0u32)];
        let mut panels = 0usize;
        while let Some((a, b, whole, depth)) = stack.pop() {
            let m = (a.clone() + &b) / &two;
            let left = self.integrate(f, &a, &m);
            let right = self.integrate(f, &m, &b);
            let split = left.clone() + &right;
            let err = (split.clone() - &whole).abs().to_f64();
            let scale = split.abs().to_f64();
            if err <= rel_tol * scale || err <= abs_floor || depth >= 40 {
                total += split;
                panels += 1;
                if panels > MAX_PANELS {
                    return Err(Error::SolverFailure("quadrature panel budget exhausted".into()));
                }
            } else {
                stack.push((m.clone(), b, right, depth + 1));
                stack.push((a, m, left, depth + 1));
            }
        }
        Ok(total)
    }
}

fn legendre_with_derivative<R: Real>(n: usize, x: &R, one: &R) -> (R, R) {
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = x.lit(k as f64);
        let p2 = ((kf.clone() * x.lit(2.0) - one) * x * &p1 - (kf.clone() - one) * &p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = x.lit(n as f64) * (x.clone() * &p1 - &p0) / (x.square() - one);
    (p1, d)
}

/// Rule size and tolerance used for signal integrals at `prec`.
pub(crate) fn default_rule<R: Real>(prec: Precision) -> (GaussLegendre<R>, f64) {
    if prec.is_fast() {
        (GaussLegendre::new(20, prec), 1e-14)
    } else {
        let n = (prec.digits() as usize / 2).clamp(24, 80);
        (GaussLegendre::new(n, prec), 1e-30_f64.max(prec.epsilon() * 1e10))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::MpReal;

    #[test]
    fn weights_sum_to_two() {
        let g = GaussLegendre::<f64>::new(12, Precision::FAST);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomials_are_exact() {
        let g = GaussLegendre::<f64>::new(5, Precision::FAST);
        // degree 9 is exact for 5 points
        let v = g.integrate(&|x: &f64| x.powi(8) + x.powi(9), &0.0, &1.0);
        assert!((v - (1.0 / 9.0 + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let g = GaussLegendre::<f64>::new(10, Precision::FAST);
        let v = g.integrate_adaptive(&|x: &f64| (40.0 * x).cos().powi(2), &0.0, &3.0, 1e-13, 0.0).unwrap();
        let exact = 1.5 + (240.0f64).sin() / 160.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn high_precision_rule() {
        let p = Precision::new(50).unwrap();
        let g = GaussLegendre::<MpReal>::new(30, p);
        let v = g.integrate(&|x: &MpReal| x.clone().cos(), &MpReal::zero(p), &MpReal::one(p));
        let exact = MpReal::one(p).sin();
        assert!((v - exact).abs().to_f64() < 1e-45);
    }
}
