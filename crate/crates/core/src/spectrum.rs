//! Constrained yield maximization as a generalized eigenvalue problem.
//!
//! In the rotated frame the coefficients are `(B, μ̃)` with `B` free, and the
//! overlap matrix splits into blocks `Δ̃`, `Γ`, `Δ̄`. Stationary points of the
//! yield satisfy `(Δ̃ - Y) B = -Γ μ̃` together with the scalar condition
//! `s(Y) = μ̃ᵀΔ̄μ̃ + (Γμ̃)ᵀB - Y‖μ̃‖² = 0`, which is solved either as a
//! secular equation (primary path) or as an explicit polynomial (cross-check).

use std::fmt;

use crate::constraints::RotatedFrame;
use crate::domain::OverlapMatrix;
use crate::error::{Error, Result};
use crate::linalg::{dot, lu_solve, norm, symmetric_eigen, tridiagonalize, Matrix};
use crate::real::{Precision, Real};
use crate::signal::FourierCosineSignal;

/// `R Δ Rᵀ = [[Δ̃, Γ], [Γᵀ, Δ̄]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition<R> {
    delta_free: Matrix<R>,
    gamma: Matrix<R>,
    delta_fixed: Matrix<R>,
}

impl<R: Real> BlockDecomposition<R> {
    /// `Δ̃`, `(N+1-M) x (N+1-M)`.
    pub fn delta_free(&self) -> &Matrix<R> {
        &self.delta_free
    }

    /// `Γ`, `(N+1-M) x M`.
    pub fn gamma(&self) -> &Matrix<R> {
        &self.gamma
    }

    /// `Δ̄`, `M x M`.
    pub fn delta_fixed(&self) -> &Matrix<R> {
        &self.delta_fixed
    }

    pub fn free_dim(&self) -> usize {
        self.delta_free.rows()
    }

    pub fn constrained_dim(&self) -> usize {
        self.delta_fixed.rows()
    }
}

pub fn rotate_and_partition<R: Real>(
    delta: &OverlapMatrix<R>,
    frame: &RotatedFrame<R>,
) -> Result<BlockDecomposition<R>> {
    if delta.band_limit() != frame.band_limit() {
        return Err(Error::InvalidArgument(format!(
            "overlap matrix has band limit {} but the frame was built for {}",
            delta.band_limit(),
            frame.band_limit()
        )));
    }
    let r = frame.rotation();
    let mut rotated = r.matmul(delta.entries()).matmul(&r.transpose());
    rotated.symmetrize();
    let k = frame.free_dim();
    let m = frame.constrained_dim();
    Ok(BlockDecomposition {
        delta_free: rotated.block(0, 0, k, k),
        gamma: rotated.block(0, k, k, m),
        delta_fixed: rotated.block(k, k, m, m),
    })
}

/// Which eigenvalue equation produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Secular,
    Polynomial,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Secular => write!(f, "secular"),
            Method::Polynomial => write!(f, "polynomial"),
        }
    }
}

/// Per-root accuracy report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootDiagnostics {
    /// `|s(λ)|` divided by the magnitude of its terms.
    pub secular_residual: f64,
    /// `‖(Δ̃ - λ) B + Γ μ̃‖ / (‖Δ̃‖ ‖B‖ + ‖Γ μ̃‖)`.
    pub stationarity_residual: f64,
    /// Root-finding iterations spent on this root.
    pub iterations: usize,
    /// The root sits on a pole whose weight vanished; its signal is the
    /// finite part of a limit and need not attain the eigenvalue.
    pub deflated: bool,
}

/// All stationary yields with their signals, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSpectrum<R> {
    pub method: Method,
    pub eigenvalues: Vec<R>,
    pub signals: Vec<FourierCosineSignal<R>>,
    pub free_parts: Vec<Vec<R>>,
    pub diagnostics: Vec<RootDiagnostics>,
    pub warnings: Vec<String>,
}

impl<R: Real> GeneralizedSpectrum<R> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The optimal yield `λ_max`.
    pub fn max_eigenvalue(&self) -> &R {
        self.eigenvalues.last().expect("spectra are never empty")
    }

    /// Signal attaining `λ_max`.
    pub fn top_signal(&self) -> &FourierCosineSignal<R> {
        self.signals.last().expect("spectra are never empty")
    }

    /// `|λ_i - other_i| / |λ_i|` per index; `None` when the lengths differ.
    pub fn relative_differences(&self, other: &Self) -> Option<Vec<f64>> {
        if self.len() != other.len() {
            return None;
        }
        Some(
            self.eigenvalues
                .iter()
                .zip(&other.eigenvalues)
                .map(|(a, b)| ((a.clone() - b).abs() / a.abs()).to_f64())
                .collect(),
        )
    }

    fn push_range_warnings(&mut self, prec: Precision) {
        let zero = match self.eigenvalues.first() {
            Some(first) => first.lit(0.0),
            None => return,
        };
        let one = zero.lit(1.0);
        for (i, y) in self.eigenvalues.iter().enumerate() {
            if *y <= zero || *y >= one {
                self.warnings.push(format!("eigenvalue {} = {} lies outside (0, 1)", i + 1, y.to_f64()));
            }
        }
        let smallest = self.eigenvalues[0].abs().to_f64();
        if smallest < prec.trust_floor() {
            self.warnings.push(format!(
                "smallest eigenvalue {smallest:e} is below the trust floor {:e} for {prec}; increase precision",
                prec.trust_floor()
            ));
        }
        let deflated = self.diagnostics.iter().filter(|d| d.deflated).count();
        if deflated > 0 {
            self.warnings.push(format!(
                "{deflated} root(s) deflated: the constraint coupling vanishes along an eigenvector of the free block"
            ));
        }
    }
}

/// Shared inputs of both eigenvalue equations.
struct Reduced<R> {
    g: Vec<R>,
    c: R,
    m2: R,
}

fn reduced<R: Real>(blocks: &BlockDecomposition<R>, frame: &RotatedFrame<R>) -> Result<Reduced<R>> {
    if blocks.free_dim() != frame.free_dim() || blocks.constrained_dim() != frame.constrained_dim() {
        return Err(Error::InvalidArgument("block decomposition does not match the frame".into()));
    }
    let mu = frame.mu_tilde();
    let m2 = dot(mu, mu);
    if m2.is_zero() {
        return Err(Error::InvalidArgument("μ̃ vanishes: the constraints admit the zero signal".into()));
    }
    let g = blocks.gamma.matvec(mu);
    let c = blocks.delta_fixed.quadratic_form(mu);
    Ok(Reduced { g, c, m2 })
}

/// Yield-stationarity residual and assembled signal for one root.
fn finish_root<R: Real>(
    blocks: &BlockDecomposition<R>,
    frame: &RotatedFrame<R>,
    red: &Reduced<R>,
    y: &R,
    b: &[R],
) -> (FourierCosineSignal<R>, f64) {
    if b.is_empty() {
        return (frame.reconstruct(b), 0.0);
    }
    let mut r = blocks.delta_free.matvec(b);
    for ((ri, bi), gi) in r.iter_mut().zip(b).zip(&red.g) {
        *ri -= y.clone() * bi;
        *ri += gi;
    }
    let scale = blocks.delta_free.max_abs() * norm(b).to_f64() + norm(&red.g).to_f64();
    let res = norm(&r).to_f64();
    let stationarity = if scale > 0.0 { res / scale } else { res };
    (frame.reconstruct(b), stationarity)
}

/// Secular function `s(Y) = c - Σ w_k/(d_k - Y) - Y m²` written in offsets
/// `τ = Y - origin`, `δ_k = d_k - origin` so roots near a pole keep their
/// relative accuracy.
struct Secular<'a, R> {
    c: &'a R,
    m2: &'a R,
    weights: &'a [R],
}

impl<R: Real> Secular<'_, R> {
    /// `(s, s', magnitude of the terms)`.
    fn eval(&self, origin: &R, shifted: &[R], tau: &R) -> (R, R, f64) {
        let y = origin.clone() + tau;
        let mut s = self.c.clone() - y.clone() * self.m2;
        let mut ds = -self.m2.clone();
        let mut mag = self.c.abs().to_f64() + (y * self.m2).abs().to_f64();
        for (w, delta) in self.weights.iter().zip(shifted) {
            let gap = delta.clone() - tau;
            let term = w.clone() / &gap;
            mag += term.abs().to_f64();
            ds -= term.clone() / &gap;
            s -= term;
        }
        (s, ds, mag)
    }
}

const MAX_ROOT_ITERATIONS: usize = 5000;

/// Finds the unique root of the decreasing secular function in the open
/// interval between `left` and `right` poles (`None` = unbounded side).
/// Returns `(origin, τ, |s|/mag, iterations)`.
fn secular_root<R: Real>(
    sec: &Secular<'_, R>,
    poles: &[R],
    left: Option<usize>,
    right: Option<usize>,
    prec: Precision,
) -> Result<(R, R, f64, usize)> {
    let zero = R::zero(prec);
    let two = R::from_f64(2.0, prec);
    let tol = prec.root_tolerance();

    // Pick the origin at the pole nearer to the root.
    let (origin, mut ta, mut tb) = match (left, right) {
        (Some(l), Some(r)) => {
            let mid = (poles[l].clone() + &poles[r]) / &two;
            let shifted: Vec<R> = poles.iter().map(|p| p.clone() - &poles[l]).collect();
            let (s_mid, _, _) = sec.eval(&poles[l], &shifted, &(mid.clone() - &poles[l]));
            if s_mid > zero {
                (poles[r].clone(), mid - &poles[r], zero.clone())
            } else {
                (poles[l].clone(), zero.clone(), mid - &poles[l])
            }
        }
        (None, Some(r)) => {
            let origin = poles[r].clone();
            let shifted: Vec<R> = poles.iter().map(|p| p.clone() - &origin).collect();
            let mut span = R::one(prec);
            while sec.eval(&origin, &shifted, &(-span.clone())).0 <= zero {
                span *= &two;
                if span.to_f64() > 1e30 {
                    return Err(Error::SolverFailure("secular root below the spectrum not bracketed".into()));
                }
            }
            (origin, -span, zero.clone())
        }
        (Some(l), None) => {
            let origin = poles[l].clone();
            let shifted: Vec<R> = poles.iter().map(|p| p.clone() - &origin).collect();
            let mut span = R::one(prec);
            while sec.eval(&origin, &shifted, &span).0 >= zero {
                span *= &two;
                if span.to_f64() > 1e30 {
                    return Err(Error::SolverFailure("secular root above the spectrum not bracketed".into()));
                }
            }
            (origin, zero.clone(), span)
        }
        (None, None) => unreachable!("handled by the caller"),
    };
    let shifted: Vec<R> = poles.iter().map(|p| p.clone() - &origin).collect();

    let mut x = (ta.clone() + &tb) / &two;
    for iter in 1..=MAX_ROOT_ITERATIONS {
        let (s, ds, mag) = sec.eval(&origin, &shifted, &x);
        let scale = (origin.clone() + &x).abs().to_f64();
        if s.is_zero() {
            return Ok((origin, x, 0.0, iter));
        }
        if s > zero {
            ta = x.clone();
        } else {
            tb = x.clone();
        }
        let newton = x.clone() - s.clone() / &ds;
        let next = if newton > ta && newton < tb { newton } else { (ta.clone() + &tb) / &two };
        let step = (next.clone() - &x).abs().to_f64();
        x = next;
        let width = (tb.clone() - &ta).abs().to_f64();
        if step <= tol * scale || width <= tol * scale {
            let (s, _, mag) = sec.eval(&origin, &shifted, &x);
            return Ok((origin, x, s.abs().to_f64() / mag, iter));
        }
        if iter == MAX_ROOT_ITERATIONS {
            return Ok((origin, x, s.abs().to_f64() / mag, iter));
        }
    }
    unreachable!()
}

/// Primary solver: eigendecomposition of `Δ̃` plus one bracketed root of the
/// secular equation per interval between poles.
pub fn secular_spectrum<R: Real>(
    blocks: &BlockDecomposition<R>,
    frame: &RotatedFrame<R>,
    prec: Precision,
) -> Result<GeneralizedSpectrum<R>> {
    let red = reduced(blocks, frame)?;
    let k = blocks.free_dim();
    let mut spectrum = GeneralizedSpectrum {
        method: Method::Secular,
        eigenvalues: Vec::with_capacity(k + 1),
        signals: Vec::with_capacity(k + 1),
        free_parts: Vec::with_capacity(k + 1),
        diagnostics: Vec::with_capacity(k + 1),
        warnings: Vec::new(),
    };
    if k == 0 {
        let y = red.c.clone() / &red.m2;
        let (signal, stationarity) = finish_root(blocks, frame, &red, &y, &[]);
        spectrum.eigenvalues.push(y);
        spectrum.signals.push(signal);
        spectrum.free_parts.push(Vec::new());
        spectrum.diagnostics.push(RootDiagnostics {
            secular_residual: 0.0,
            stationarity_residual: stationarity,
            iterations: 0,
            deflated: false,
        });
        spectrum.push_range_warnings(prec);
        return Ok(spectrum);
    }

    let eig = symmetric_eigen(&blocks.delta_free, prec)?;
    let d = eig.values;
    let mut u: Vec<Vec<R>> = (0..k).map(|j| eig.vectors.column(j)).collect();
    let mut v: Vec<R> = u.iter().map(|uj| dot(uj, &red.g)).collect();
    let eps = prec.epsilon();
    let norm_free = d.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);

    // Merge numerically coincident poles so that each group carries a single
    // weight; the orthogonal remainder of the group has zero weight.
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k {
            let gap = (d[end].clone() - &d[end - 1]).abs().to_f64();
            let size = d[end].abs().to_f64().max(d[end - 1].abs().to_f64()) + eps * norm_free;
            if gap > 100.0 * eps * size {
                break;
            }
            end += 1;
        }
        for j in (start + 1)..end {
            let r = (v[start].square() + v[j].square()).sqrt();
            if r.is_zero() {
                continue;
            }
            let c = v[start].clone() / &r;
            let s = v[j].clone() / &r;
            let (ua, ub) = (u[start].clone(), u[j].clone());
            u[start] = ua.iter().zip(&ub).map(|(a, b)| c.clone() * a + s.clone() * b).collect();
            u[j] = ua.iter().zip(&ub).map(|(a, b)| c.clone() * b - s.clone() * a).collect();
            v[start] = r;
            v[j] = R::zero(prec);
        }
        start = end;
    }

    let m2_f = red.m2.to_f64();
    let deflate: Vec<bool> = (0..k)
        .map(|j| v[j].square().to_f64() <= 100.0 * eps * (d[j].abs().to_f64() + eps * norm_free) * m2_f)
        .collect();
    let live: Vec<usize> = (0..k).filter(|&j| !deflate[j]).collect();
    let poles: Vec<R> = live.iter().map(|&j| d[j].clone()).collect();
    let weights: Vec<R> = live.iter().map(|&j| v[j].square()).collect();
    let sec = Secular { c: &red.c, m2: &red.m2, weights: &weights };

    // (eigenvalue, B, secular residual, iterations, deflated)
    let mut roots: Vec<(R, Vec<R>, f64, usize, bool)> = Vec::with_capacity(k + 1);
    let free_part = |origin: &R, tau: &R, skip_near: bool| -> Vec<R> {
        let mut b = vec![R::zero(prec); k];
        for &j in &live {
            let gap = d[j].clone() - origin - tau;
            if skip_near && gap.abs().to_f64() <= 100.0 * eps * (d[j].abs().to_f64() + eps * norm_free) {
                continue;
            }
            let coef = v[j].clone() / gap;
            for (bi, ui) in b.iter_mut().zip(&u[j]) {
                *bi -= coef.clone() * ui;
            }
        }
        b
    };

    if poles.is_empty() {
        let y = red.c.clone() / &red.m2;
        let b = vec![R::zero(prec); k];
        roots.push((y, b, 0.0, 0, false));
    } else {
        let l = poles.len();
        for slot in 0..=l {
            let left = slot.checked_sub(1);
            let right = (slot < l).then_some(slot);
            let (origin, tau, residual, iterations) = secular_root(&sec, &poles, left, right, prec)?;
            let b = free_part(&origin, &tau, false);
            roots.push((origin + &tau, b, residual, iterations, false));
        }
    }
    for j in (0..k).filter(|&j| deflate[j]) {
        let y = d[j].clone();
        let zero = R::zero(prec);
        let b = free_part(&y, &zero, true);
        let (s, _, mag) = sec.eval(&zero, &poles, &y);
        roots.push((y, b, s.abs().to_f64() / mag, 0, true));
    }
    if roots.len() != k + 1 {
        return Err(Error::SolverFailure(format!("found {} roots, expected {}", roots.len(), k + 1)));
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite roots"));

    for (y, b, secular_residual, iterations, deflated) in roots {
        let (signal, stationarity_residual) = finish_root(blocks, frame, &red, &y, &b);
        spectrum.eigenvalues.push(y);
        spectrum.signals.push(signal);
        spectrum.free_parts.push(b);
        spectrum.diagnostics.push(RootDiagnostics { secular_residual, stationarity_residual, iterations, deflated });
    }
    spectrum.push_range_warnings(prec);
    Ok(spectrum)
}

/// Dense polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Real> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Real::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `a + b Y`.
    pub fn linear(a: R, b: R) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = self.coeffs[0].lit(0.0);
        Poly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(|| zero.clone());
                    match other.coeffs.get(i) {
                        Some(b) => a + b,
                        None => a,
                    }
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let zero = self.coeffs[0].lit(0.0);
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a.clone() * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s).collect())
    }

    /// `(p, p', p'')` at `x` by Horner.
    pub fn eval_with_derivatives(&self, x: &R) -> (R, R, R) {
        let zero = x.lit(0.0);
        let mut p = self.coeffs.last().expect("non-empty").clone();
        let mut dp = zero.clone();
        let mut ddp = zero;
        for c in self.coeffs.iter().rev().skip(1) {
            ddp = ddp * x + &dp;
            dp = dp * x + &p;
            p = p * x + c;
        }
        (p, dp, ddp.clone() + &ddp)
    }

    pub fn eval(&self, x: &R) -> R {
        self.eval_with_derivatives(x).0
    }

    /// Bound on the rounding error of evaluating the polynomial at `x`.
    fn rounding_level(&self, x: &R, prec: Precision) -> f64 {
        let ax = x.abs().to_f64();
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * ax + c.abs().to_f64();
        }
        4.0 * (self.degree() + 1) as f64 * prec.epsilon() * acc
    }

    /// Quotient of division by `(Y - root)`.
    fn deflate(&self, root: &R) -> Self {
        let n = self.degree();
        let mut q = Vec::with_capacity(n);
        let mut acc = self.coeffs[n].clone();
        for i in (0..n).rev() {
            q.push(acc.clone());
            acc = self.coeffs[i].clone() + acc * root;
        }
        q.reverse();
        Poly::new(q)
    }
}

/// Builds `q(Y) = -s(Y) det(Δ̃ - Y)`, the degree `N+2-M` polynomial whose
/// roots are the generalized eigenvalues.
///
/// `Δ̃ = Q T Qᵀ` is reduced to tridiagonal form; with `h = Qᵀ Γ μ̃`,
/// `gᵀ adj(Δ̃ - Y) g = hᵀ adj(T - Y) h`, and the adjugate of a tridiagonal
/// matrix is given entrywise by products of leading and trailing principal
/// minors.
pub fn eigenvalue_polynomial<R: Real>(
    blocks: &BlockDecomposition<R>,
    frame: &RotatedFrame<R>,
    prec: Precision,
) -> Result<Poly<R>> {
    let red = reduced(blocks, frame)?;
    let k = blocks.free_dim();
    let zero = R::zero(prec);
    let one = R::one(prec);
    let m2_y = Poly::linear(zero.clone(), red.m2.clone());
    let minus_c = Poly::constant(-red.c.clone());
    if k == 0 {
        return Ok(m2_y.add(&minus_c));
    }
    let tri = tridiagonalize(&blocks.delta_free, prec);
    let h = tri.q.tr_matvec(&red.g);
    let a = &tri.diag;
    let beta = &tri.offdiag;
    let diag_minus_y = |i: usize| Poly::linear(a[i].clone(), -one.clone());

    // theta[i] = det of the leading i x i block of T - Y (theta[0] = 1)
    let mut theta = vec![Poly::constant(one.clone()), diag_minus_y(0)];
    for i in 2..=k {
        let next = diag_minus_y(i - 1).mul(&theta[i - 1]).add(&theta[i - 2].scale(&-beta[i - 2].square()));
        theta.push(next);
    }
    // phi[i] = det of the trailing block starting at row i (phi[k] = 1)
    let mut phi = vec![Poly::constant(one.clone()); k + 2];
    phi[k - 1] = diag_minus_y(k - 1);
    for i in (0..k.saturating_sub(1)).rev() {
        phi[i] = diag_minus_y(i).mul(&phi[i + 1]).add(&phi[i + 2].scale(&-beta[i].square()));
    }
    let p = theta[k].clone();

    // hᵀ adj(T - Y) h
    let mut quad = Poly::constant(zero.clone());
    for i in 0..k {
        let diag_term = theta[i].mul(&phi[i + 1]).scale(&h[i].square());
        quad = quad.add(&diag_term);
        let mut beta_prod = one.clone();
        for j in (i + 1)..k {
            beta_prod *= &beta[j - 1];
            let sign = if (j - i) % 2 == 0 { one.clone() } else { -one.clone() };
            let factor = sign * &beta_prod * &h[i] * &h[j] * R::from_f64(2.0, prec);
            quad = quad.add(&theta[i].mul(&phi[j + 1]).scale(&factor));
        }
    }
    Ok(m2_y.mul(&p).add(&minus_c.mul(&p)).add(&quad))
}

/// All real roots of a real-rooted polynomial, ascending: Laguerre iteration
/// started below the smallest remaining root with forward deflation, each
/// root polished by Newton on the original polynomial.
pub fn real_roots<R: Real>(poly: &Poly<R>, start: &R, prec: Precision) -> Result<Vec<(R, usize)>> {
    let n = poly.degree();
    let mut work = poly.clone();
    let mut roots = Vec::with_capacity(n);
    let mut x = start.clone();
    let tol = prec.root_tolerance();
    for _ in 0..n {
        let deg = work.degree();
        let nf = R::from_usize(deg, prec);
        let mut iterations = 0;
        if deg == 1 {
            x = -work.coeffs[0].clone() / &work.coeffs[1];
        } else {
            for iter in 1..=MAX_ROOT_ITERATIONS {
                iterations = iter;
                let (p, dp, ddp) = work.eval_with_derivatives(&x);
                if p.abs().to_f64() <= work.rounding_level(&x, prec) {
                    break;
                }
                let g = dp / &p;
                let hh = g.square() - ddp / &p;
                let disc = ((nf.clone() - R::one(prec)) * (nf.clone() * &hh - g.square())).max_of(R::zero(prec)).sqrt();
                let plus = g.clone() + &disc;
                let minus = g - &disc;
                let denom = if plus.abs() >= minus.abs() { plus } else { minus };
                if denom.is_zero() {
                    return Err(Error::SolverFailure("Laguerre iteration stalled".into()));
                }
                let step = nf.clone() / denom;
                x -= &step;
                if step.abs().to_f64() <= tol * x.abs().to_f64() {
                    break;
                }
                if iter == MAX_ROOT_ITERATIONS {
                    return Err(Error::SolverFailure("Laguerre iteration did not converge".into()));
                }
            }
        }
        for _ in 0..100 {
            iterations += 1;
            let (p, dp, _) = poly.eval_with_derivatives(&x);
            if p.abs().to_f64() <= poly.rounding_level(&x, prec) || dp.is_zero() {
                break;
            }
            let step = p / dp;
            x -= &step;
            if step.abs().to_f64() <= tol * x.abs().to_f64() {
                break;
            }
        }
        work = work.deflate(&x);
        roots.push((x.clone(), iterations));
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite roots"));
    Ok(roots)
}

/// Cross-check solver: roots of the explicit eigenvalue polynomial, with
/// signals from a dense solve of `(Δ̃ - λ) B = -Γ μ̃`.
pub fn polynomial_spectrum<R: Real>(
    blocks: &BlockDecomposition<R>,
    frame: &RotatedFrame<R>,
    prec: Precision,
) -> Result<GeneralizedSpectrum<R>> {
    let red = reduced(blocks, frame)?;
    let poly = eigenvalue_polynomial(blocks, frame, prec)?;
    let k = blocks.free_dim();
    if poly.degree() != k + 1 {
        return Err(Error::SolverFailure(format!(
            "eigenvalue polynomial has degree {}, expected {}",
            poly.degree(),
            k + 1
        )));
    }
    let roots = real_roots(&poly, &R::from_f64(-1.0, prec), prec)?;
    let mut spectrum = GeneralizedSpectrum {
        method: Method::Polynomial,
        eigenvalues: Vec::with_capacity(k + 1),
        signals: Vec::with_capacity(k + 1),
        free_parts: Vec::with_capacity(k + 1),
        diagnostics: Vec::with_capacity(k + 1),
        warnings: Vec::new(),
    };
    let rhs: Vec<R> = red.g.iter().map(|x| -x.clone()).collect();
    for (y, iterations) in roots {
        let shifted = Matrix::from_fn(k, k, |i, j| {
            let e = blocks.delta_free[(i, j)].clone();
            if i == j {
                e - &y
            } else {
                e
            }
        });
        let b = if k == 0 { Vec::new() } else { lu_solve(&shifted, &rhs)? };
        let (signal, stationarity_residual) = finish_root(blocks, frame, &red, &y, &b);
        let (p, _, _) = poly.eval_with_derivatives(&y);
        let mag: f64 =
            poly.coeffs().iter().enumerate().map(|(i, c)| c.abs().to_f64() * y.abs().to_f64().powi(i as i32)).sum();
        spectrum.eigenvalues.push(y);
        spectrum.signals.push(signal);
        spectrum.free_parts.push(b);
        spectrum.diagnostics.push(RootDiagnostics {
            secular_residual: if mag > 0.0 { p.abs().to_f64() / mag } else { 0.0 },
            stationarity_residual,
            iterations,
            deflated: false,
        });
    }
    spectrum.push_range_warnings(prec);
    Ok(spectrum)
}

/// Minimum-energy interpolant `Rᵀ (0, μ̃)`.
pub fn fk_min_energy_signal<R: Real>(frame: &RotatedFrame<R>) -> FourierCosineSignal<R> {
    frame.particular_solution()
}

/// Eigenpairs of Δ in descending order; eigenvectors have unit energy.
pub fn slepian_modes<R: Real>(delta: &OverlapMatrix<R>, prec: Precision) -> Result<Vec<(R, FourierCosineSignal<R>)>> {
    let eig = symmetric_eigen(delta.entries(), prec)?;
    let n = eig.values.len();
    Ok((0..n)
        .rev()
        .map(|j| {
            let signal = FourierCosineSignal::new(eig.vectors.column(j)).expect("finite eigenvector");
            (eig.values[j].clone(), signal)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{alternating_constraints, constraint_matrix, orthonormal_frame};
    use crate::domain::{overlap_matrix, Domain};
    use crate::real::MpReal;

    fn setup<R: Real>(n: usize, m: usize, a: f64, seed: u64, prec: Precision) -> (OverlapMatrix<R>, RotatedFrame<R>) {
        let a = R::from_f64(a, prec);
        let domain = Domain::new(vec![(-a.clone(), a.clone())], prec).unwrap();
        let delta = overlap_matrix(&domain, n, prec).unwrap();
        let cs = alternating_constraints(&R::zero(prec), &a, m).unwrap();
        let cm = constraint_matrix(&cs, n, prec).unwrap();
        let frame = orthonormal_frame(&cm, cs.values(), seed, prec).unwrap();
        (delta, frame)
    }

    #[test]
    fn identity_rotates_to_identity() {
        let p = Precision::FAST;
        let cs = alternating_constraints(&0.0, &1.0, 3).unwrap();
        let cm = constraint_matrix(&cs, 6, p).unwrap();
        let frame = orthonormal_frame(&cm, cs.values(), 3, p).unwrap();
        let delta = overlap_matrix(&Domain::<f64>::full(p), 6, p).unwrap();
        let blocks = rotate_and_partition(&delta, &frame).unwrap();
        assert!(blocks.delta_free().max_abs_diff(&Matrix::identity(4, p)) < 1e-13);
        assert!(blocks.gamma().max_abs() < 1e-13);
        assert!(blocks.delta_fixed().max_abs_diff(&Matrix::identity(3, p)) < 1e-13);
        let spec = secular_spectrum(&blocks, &frame, p).unwrap();
        assert_eq!(spec.len(), 5);
        assert!(spec.eigenvalues.iter().all(|y| (y - 1.0).abs() < 1e-12));
    }

    #[test]
    fn square_system_gives_single_rayleigh_quotient() {
        let p = Precision::new(40).unwrap();
        let (delta, frame) = setup::<MpReal>(4, 5, 1.0, 0, p);
        let blocks = rotate_and_partition(&delta, &frame).unwrap();
        assert_eq!(blocks.free_dim(), 0);
        let spec = secular_spectrum(&blocks, &frame, p).unwrap();
        assert_eq!(spec.len(), 1);

        // unique interpolant by a direct linear solve
        let one = MpReal::one(p);
        let cs = alternating_constraints(&MpReal::zero(p), &one, 5).unwrap();
        let cm = constraint_matrix(&cs, 4, p).unwrap();
        let a = lu_solve(cm.entries(), cs.values()).unwrap();
        let energy = dot(&a, &a);
        let direct = delta.energy_inside(&a) / energy;
        let tol = direct.to_f64() * 1e-30;
        assert!((spec.eigenvalues[0].clone() - &direct).abs().to_f64() < tol);
        let poly = polynomial_spectrum(&blocks, &frame, p).unwrap();
        assert_eq!(poly.len(), 1);
        assert!((poly.eigenvalues[0].clone() - &direct).abs().to_f64() < tol);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = Precision::FAST;
        let (_, frame) = setup::<f64>(6, 3, 1.0, 0, p);
        let (delta, _) = setup::<f64>(7, 3, 1.0, 0, p);
        assert!(rotate_and_partition(&delta, &frame).is_err());
    }

    #[test]
    fn fast_secular_roots_satisfy_invariants() {
        let p = Precision::FAST;
        let (delta, frame) = setup::<f64>(6, 3, 1.0, 11, p);
        let blocks = rotate_and_partition(&delta, &frame).unwrap();
        let spec = secular_spectrum(&blocks, &frame, p).unwrap();
        assert_eq!(spec.len(), 5);
        for w in spec.eigenvalues.windows(2) {
            assert!(w[0] < w[1]);
        }
        let top = spec.max_eigenvalue();
        let ratio = delta.energy_inside(spec.top_signal().coeffs()) / spec.top_signal().energy_per_period();
        assert!((ratio - top).abs() < 1e-10 * top);
        assert!(spec.diagnostics.iter().all(|d| d.stationarity_residual < 1e-10));
    }

    #[test]
    fn polynomial_degree_matches_free_dimension() {
        let p = Precision::new(40).unwrap();
        let (delta, frame) = setup::<MpReal>(10, 5, 1.0, 2, p);
        let blocks = rotate_and_partition(&delta, &frame).unwrap();
        let poly = eigenvalue_polynomial(&blocks, &frame, p).unwrap();
        assert_eq!(poly.degree(), 7);
        assert_eq!(polynomial_spectrum(&blocks, &frame, p).unwrap().len(), 7);
    }

    #[test]
    fn methods_agree_in_high_precision() {
        let p = Precision::new(60).unwrap();
        let (delta, frame) = setup::<MpReal>(6, 3, 1.0, 5, p);
        let blocks = rotate_and_partition(&delta, &frame).unwrap();
        let a = secular_spectrum(&blocks, &frame, p).unwrap();
        let b = polynomial_spectrum(&blocks, &frame, p).unwrap();
        let diffs = a.relative_differences(&b).unwrap();
        assert!(diffs.iter().all(|&d| d < 1e-30), "{diffs:?}");
    }

    #[test]
    fn poly_helpers() {
        // (Y - 1)(Y - 2)(Y - 3)
        let p = Poly::new(vec![-6.0, 11.0, -6.0, 1.0]);
        let roots = real_roots(&p, &-10.0, Precision::FAST).unwrap();
        let values: Vec<f64> = roots.iter().map(|r| r.0).collect();
        for (r, e) in values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-13);
        }
        let (v, d, dd) = p.eval_with_derivatives(&0.0);
        assert_eq!((v, d, dd), (-6.0, 11.0, -12.0));
        assert_eq!(Poly::new(vec![1.0, 0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn slepian_modes_descending_with_trace() {
        let p = Precision::FAST;
        let (delta, _) = setup::<f64>(8, 1, 1.0, 0, p);
        let modes = slepian_modes(&delta, p).unwrap();
        assert_eq!(modes.len(), 9);
        for w in modes.windows(2) {
            assert!(w[0].0 >= w[1].0);
        }
        let sum: f64 = modes.iter().map(|m| m.0).sum();
        assert!((sum - delta.entries().trace()).abs() < 1e-12);
        for (_, s) in &modes {
            assert!((s.energy_per_period() - 1.0).abs() < 1e-12);
        }
        let full = overlap_matrix(&Domain::<f64>::full(p), 5, p).unwrap();
        assert!(slepian_modes(&full, p).unwrap().iter().all(|m| (m.0 - 1.0).abs() < 1e-13));
    }

    #[test]
    fn fk_signal_energy() {
        let p = Precision::FAST;
        let (_, frame) = setup::<f64>(10, 5, 1.0, 9, p);
        let fk = fk_min_energy_signal(&frame);
        assert!((fk.energy_per_period() - frame.mu_tilde_energy()).abs() < 1e-10 * frame.mu_tilde_energy());
    }
}
