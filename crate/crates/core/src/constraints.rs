//! Interpolation constraints `f(t_j) = μ_j` and the constraint-adapted
//! orthonormal frame that splits coefficients into free and fixed parts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, solve_upper_transposed, thin_qr, Matrix};
use crate::real::{Precision, Real};
use crate::signal::FourierCosineSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<R> {
    points: Vec<R>,
    values: Vec<R>,
}

impl<R: Real> ConstraintSet<R> {
    pub fn new(points: Vec<R>, values: Vec<R>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("at least one constraint is required".into()));
        }
        if points.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} constraint points but {} values",
                points.len(),
                values.len()
            )));
        }
        if points.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("constraint data must be finite".into()));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidArgument(format!("constraint points {i} and {j} coincide")));
                }
            }
        }
        Ok(ConstraintSet { points, values })
    }

    pub fn points(&self) -> &[R] {
        &self.points
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `t_j = lo + (hi - lo) j / m`, `μ_j = (-1)^j` for `j = 0..m`.
pub fn alternating_constraints<R: Real>(lo: &R, hi: &R, m: usize) -> Result<ConstraintSet<R>> {
    if m < 1 {
        return Err(Error::InvalidArgument("need at least one constraint (m >= 1)".into()));
    }
    if lo >= hi {
        return Err(Error::InvalidArgument(format!("constraint interval needs lo < hi, got ({lo}, {hi})")));
    }
    let span = hi.clone() - lo;
    let count = lo.lit(m as f64);
    let points = (0..m).map(|j| lo.clone() + span.clone() * lo.lit(j as f64) / &count).collect();
    let values = (0..m).map(|j| lo.lit(if j % 2 == 0 { 1.0 } else { -1.0 })).collect();
    ConstraintSet::new(points, values)
}

/// `M x (N+1)` matrix with `C_jm = cos(m t_j)/√π` and `C_j0 = 1/√(2π)`, so
/// that row `j` dotted with the coefficients is `f(t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix<R> {
    entries: Matrix<R>,
}

impl<R: Real> ConstraintMatrix<R> {
    /// Rows for arbitrary (possibly repeated) points.
    pub fn from_points(points: &[R], n: usize, prec: Precision) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("band limit must be >= 1".into()));
        }
        let pi = R::pi(prec);
        let inv_sqrt_pi = R::one(prec) / pi.clone().sqrt();
        let first = R::one(prec) / (R::from_f64(2.0, prec) * &pi).sqrt();
        let entries = Matrix::from_fn(points.len(), n + 1, |j, m| {
            if m == 0 {
                first.clone()
            } else {
                (points[j].clone() * R::from_usize(m, prec)).cos() * &inv_sqrt_pi
            }
        });
        Ok(ConstraintMatrix { entries })
    }

    pub fn entries(&self) -> &Matrix<R> {
        &self.entries
    }

    /// Number of constraint rows `M`.
    pub fn len(&self) -> usize {
        self.entries.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.rows() == 0
    }

    pub fn band_limit(&self) -> usize {
        self.entries.cols() - 1
    }

    /// Largest `|C·A - μ|` over the rows.
    pub fn max_residual(&self, coeffs: &[R], values: &[R]) -> f64 {
        self.entries
            .matvec(coeffs)
            .iter()
            .zip(values)
            .map(|(f, mu)| (f.clone() - mu).abs().to_f64())
            .fold(0.0, f64::max)
    }

    fn select_rows(&self, rows: &[usize]) -> Self {
        let c = self.entries.cols();
        ConstraintMatrix { entries: Matrix::from_fn(rows.len(), c, |i, j| self.entries[(rows[i], j)].clone()) }
    }
}

pub fn constraint_matrix<R: Real>(cs: &ConstraintSet<R>, n: usize, prec: Precision) -> Result<ConstraintMatrix<R>> {
    ConstraintMatrix::from_points(cs.points(), n, prec)
}

/// Keeps a maximal independent subset of constraint rows (pivoted
/// Gram–Schmidt with relative pivot threshold `tol`) and checks that every
/// dropped constraint is already implied by the kept ones.
pub fn reduce_rank<R: Real>(
    cm: &ConstraintMatrix<R>,
    values: &[R],
    tol: f64,
    prec: Precision,
) -> Result<(ConstraintMatrix<R>, Vec<R>)> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("rank tolerance must be positive".into()));
    }
    let rows = cm.len();
    assert_eq!(rows, values.len(), "one value per constraint row");
    let mut residual: Vec<Vec<R>> = cm.entries.to_rows();
    let scale = residual.iter().map(|r| norm(r).to_f64()).fold(0.0, f64::max);
    let threshold = tol * scale;
    let mut kept = Vec::new();
    let mut active: Vec<usize> = (0..rows).collect();

    while !active.is_empty() {
        let (pos, best) = active
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos, norm(&residual[i]).to_f64()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= threshold {
            break;
        }
        let pivot = active.swap_remove(pos);
        let len = norm(&residual[pivot]);
        let q: Vec<R> = residual[pivot].iter().map(|x| x.clone() / &len).collect();
        for &j in &active {
            for _ in 0..2 {
                let proj = dot(&q, &residual[j]);
                for (r, qk) in residual[j].iter_mut().zip(&q) {
                    *r -= proj.clone() * qk;
                }
            }
        }
        kept.push(pivot);
    }
    kept.sort_unstable();
    if kept.len() == rows {
        return Ok((cm.clone(), values.to_vec()));
    }

    let reduced = cm.select_rows(&kept);
    let kept_values: Vec<R> = kept.iter().map(|&i| values[i].clone()).collect();
    let particular = min_norm_solution(&reduced, &kept_values, prec);
    let all = cm.entries.matvec(&particular);
    for i in (0..rows).filter(|i| kept.binary_search(i).is_err()) {
        let res = (all[i].clone() - &values[i]).abs().to_f64();
        if res >= tol * values[i].abs().to_f64().max(1.0) {
            return Err(Error::InfeasibleConstraints { index: i, residual: res });
        }
    }
    Ok((reduced, kept_values))
}

/// Minimal-norm `A` with `C A = μ` for full-row-rank `C`.
fn min_norm_solution<R: Real>(cm: &ConstraintMatrix<R>, values: &[R], prec: Precision) -> Vec<R> {
    let qr = thin_qr(&cm.entries.transpose(), prec);
    let y = solve_upper_transposed(&qr.r, values);
    qr.q.matvec(&y)
}

/// Orthogonal change of basis `B = R A` whose last `M` rows span the row space
/// of the constraint matrix, so the last `M` coordinates are pinned to `μ̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedFrame<R> {
    rotation: Matrix<R>,
    free_dim: usize,
    mu_tilde: Vec<R>,
    seed: u64,
}

impl<R: Real> RotatedFrame<R> {
    pub fn rotation(&self) -> &Matrix<R> {
        &self.rotation
    }

    /// `N + 1 - M`.
    pub fn free_dim(&self) -> usize {
        self.free_dim
    }

    pub fn constrained_dim(&self) -> usize {
        self.mu_tilde.len()
    }

    pub fn band_limit(&self) -> usize {
        self.rotation.rows() - 1
    }

    pub fn mu_tilde(&self) -> &[R] {
        &self.mu_tilde
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `‖μ̃‖²`, the energy of the minimum-energy interpolant.
    pub fn mu_tilde_energy(&self) -> R {
        dot(&self.mu_tilde, &self.mu_tilde)
    }

    /// `A = Rᵀ (B, μ̃)`.
    pub fn reconstruct(&self, free: &[R]) -> FourierCosineSignal<R> {
        assert_eq!(free.len(), self.free_dim, "free part has the wrong length");
        let full: Vec<R> = free.iter().chain(&self.mu_tilde).cloned().collect();
        FourierCosineSignal::new(self.rotation.tr_matvec(&full)).expect("finite reconstruction")
    }

    /// `Rᵀ (0, μ̃)`.
    pub fn particular_solution(&self) -> FourierCosineSignal<R> {
        let zero = self.mu_tilde[0].lit(0.0);
        self.reconstruct(&vec![zero; self.free_dim])
    }

    /// Free coordinates `B` of an arbitrary coefficient vector.
    pub fn free_coordinates(&self, coeffs: &[R]) -> Vec<R> {
        let b = self.rotation.matvec(coeffs);
        b[..self.free_dim].to_vec()
    }
}

const MAX_COMPLETION_DRAWS: usize = 64;

/// Builds the rotated frame: Householder QR of `Cᵀ` gives an orthonormal
/// basis of the constraint space (positive pivots) and the triangular factor
/// for `μ̃`; the free directions are seeded random vectors orthonormalized
/// against it.
pub fn orthonormal_frame<R: Real>(
    cm: &ConstraintMatrix<R>,
    values: &[R],
    completion_seed: u64,
    prec: Precision,
) -> Result<RotatedFrame<R>> {
    let m = cm.len();
    let dim = cm.band_limit() + 1;
    assert_eq!(m, values.len(), "one value per constraint row");
    if m > dim {
        return Err(Error::TooManyConstraints { constraints: m, band_limit: dim - 1 });
    }
    let qr = thin_qr(&cm.entries.transpose(), prec);
    let scale = (0..m).map(|i| norm(cm.entries.row(i)).to_f64()).fold(0.0, f64::max);
    let rank = (0..m).filter(|&j| qr.r[(j, j)].abs().to_f64() > prec.rank_tolerance() * scale).count();
    if rank < m {
        return Err(Error::MustReduceRank { rank, rows: m });
    }

    let mut q1 = qr.q;
    let mut r = qr.r;
    for j in 0..m {
        if r[(j, j)] < R::zero(prec) {
            for i in 0..dim {
                q1[(i, j)] = -q1[(i, j)].clone();
            }
            for k in 0..m {
                r[(j, k)] = -r[(j, k)].clone();
            }
        }
    }
    let mu_tilde = solve_upper_transposed(&r, values);

    let free_dim = dim - m;
    let mut basis: Vec<Vec<R>> = (0..m).map(|j| q1.column(j)).collect();
    let mut completion: Vec<Vec<R>> = Vec::with_capacity(free_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(completion_seed);
    let accept = R::from_f64(0.1, prec);
    while completion.len() < free_dim {
        let mut found = None;
        for _ in 0..MAX_COMPLETION_DRAWS {
            let mut v: Vec<R> = (0..dim).map(|_| R::from_f64(rng.random_range(-1.0..1.0), prec)).collect();
            let start = norm(&v);
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(b, &v);
                    for (x, bk) in v.iter_mut().zip(b) {
                        *x -= proj.clone() * bk;
                    }
                }
            }
            let len = norm(&v);
            if len > accept.clone() * &start {
                found = Some(v.into_iter().map(|x| x / &len).collect::<Vec<R>>());
                break;
            }
        }
        let v = found.ok_or_else(|| Error::SolverFailure("could not complete the orthonormal frame".into()))?;
        basis.push(v.clone());
        completion.push(v);
    }

    let rotation =
        Matrix::from_fn(
            dim,
            dim,
            |i, k| {
                if i < free_dim {
                    completion[i][k].clone()
                } else {
                    q1[(k, i - free_dim)].clone()
                }
            },
        );
    Ok(RotatedFrame { rotation, free_dim, mu_tilde, seed: completion_seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu_solve;
    use std::f64::consts::PI;

    const P: Precision = Precision::FAST;

    #[test]
    fn alternating_single_interval() {
        let cs = alternating_constraints(&0.0, &1.0, 5).unwrap();
        let expected = [0.0, 0.2, 0.4, 0.6, 0.8];
        for (t, e) in cs.points().iter().zip(expected) {
            assert!((t - e).abs() < 1e-15);
        }
        assert_eq!(cs.values(), &[1.0, -1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn alternating_shifted_interval() {
        let cs = alternating_constraints(&0.5, &1.0, 6).unwrap();
        for (j, t) in cs.points().iter().enumerate() {
            assert!((t - (0.5 + j as f64 / 12.0)).abs() < 1e-15);
        }
        assert_eq!(cs.values(), &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn alternating_edge_cases() {
        let cs = alternating_constraints(&0.3, &1.0, 1).unwrap();
        assert_eq!(cs.points(), &[0.3]);
        assert_eq!(cs.values(), &[1.0]);
        assert!(alternating_constraints(&0.0, &1.0, 0).is_err());
        assert!(ConstraintSet::new(vec![0.1, 0.1], vec![1.0, 1.0]).is_err());
        assert!(ConstraintSet::new(vec![0.1], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn constraint_rows() {
        let cm = ConstraintMatrix::from_points(&[0.0, PI / 2.0], 6, P).unwrap();
        let row0 = cm.entries().row(0);
        assert!((row0[0] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!(row0[1..].iter().all(|x| (x - 1.0 / PI.sqrt()).abs() < 1e-15));
        let row1 = cm.entries().row(1);
        for (m, value) in row1.iter().enumerate().skip(1) {
            if m % 2 == 1 {
                assert!(value.abs() < 1e-15);
            } else {
                let sign = if m % 4 == 0 { 1.0 } else { -1.0 };
                assert!((value - sign / PI.sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn reduce_rank_drops_duplicates() {
        let cm = ConstraintMatrix::from_points(&[0.1, 0.4, 0.1], 6, P).unwrap();
        let (reduced, values) = reduce_rank(&cm, &[1.0, -1.0, 1.0], 1e-10, P).unwrap();
        assert_eq!(reduced.len(), 2);
        assert_eq!(values, vec![1.0, -1.0]);
    }

    #[test]
    fn reduce_rank_rejects_contradiction() {
        let cm = ConstraintMatrix::from_points(&[0.1, 0.1], 6, P).unwrap();
        let err = reduce_rank(&cm, &[1.0, -1.0], 1e-10, P).unwrap_err();
        assert!(matches!(err, Error::InfeasibleConstraints { index: 1, .. }), "{err:?}");
        assert!(reduce_rank(&cm, &[1.0, -1.0], 0.0, P).is_err());
    }

    #[test]
    fn reduce_rank_keeps_generic_sets() {
        let cs = alternating_constraints(&0.0, &1.0, 6).unwrap();
        let cm = constraint_matrix(&cs, 10, P).unwrap();
        let (reduced, _) = reduce_rank(&cm, cs.values(), 1e-10, P).unwrap();
        assert_eq!(reduced, cm);
    }

    #[test]
    fn single_constraint_mu_tilde() {
        let cs = alternating_constraints(&0.0, &1.0, 1).unwrap();
        let cm = constraint_matrix(&cs, 10, P).unwrap();
        let frame = orthonormal_frame(&cm, cs.values(), 7, P).unwrap();
        let expected = 1.0 / (1.0 / (2.0 * PI) + 10.0 / PI).sqrt();
        assert!((frame.mu_tilde()[0] - expected).abs() < 1e-14);
        assert_eq!(frame.free_dim(), 10);
    }

    #[test]
    fn frame_is_orthogonal_and_interpolates() {
        let cs = alternating_constraints(&0.0, &1.0, 5).unwrap();
        let cm = constraint_matrix(&cs, 10, P).unwrap();
        let frame = orthonormal_frame(&cm, cs.values(), 42, P).unwrap();
        let rrt = frame.rotation().matmul(&frame.rotation().transpose());
        assert!(rrt.max_abs_diff(&Matrix::identity(11, P)) < 1e-12);
        let ap = frame.particular_solution();
        for (t, mu) in cs.points().iter().zip(cs.values()) {
            assert!((ap.evaluate(t) - mu).abs() < 1e-10);
        }
        let b: Vec<f64> = (0..frame.free_dim()).map(|k| (k as f64 * 0.7).sin() * 3.0).collect();
        let any = frame.reconstruct(&b);
        assert!(cm.max_residual(any.coeffs(), cs.values()) < 1e-10);
        let back = frame.free_coordinates(any.coeffs());
        assert!(back.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn mu_tilde_energy_is_min_norm_energy() {
        let cs = alternating_constraints(&0.5, &1.0, 4).unwrap();
        let cm = constraint_matrix(&cs, 8, P).unwrap();
        let frame = orthonormal_frame(&cm, cs.values(), 1, P).unwrap();
        // normal equations: A = Cᵀ (C Cᵀ)^{-1} μ
        let c = cm.entries();
        let y = lu_solve(&c.matmul(&c.transpose()), cs.values()).unwrap();
        let a = c.tr_matvec(&y);
        let energy: f64 = a.iter().map(|x| x * x).sum();
        assert!((frame.mu_tilde_energy() - energy).abs() < 1e-8 * energy);
    }

    #[test]
    fn square_system_has_no_free_part() {
        let cs = alternating_constraints(&0.0, &2.0, 3).unwrap();
        let cm = constraint_matrix(&cs, 2, P).unwrap();
        let frame = orthonormal_frame(&cm, cs.values(), 0, P).unwrap();
        assert_eq!(frame.free_dim(), 0);
        let unique = lu_solve(cm.entries(), cs.values()).unwrap();
        let ap = frame.particular_solution();
        assert!(ap.coeffs().iter().zip(&unique).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let cm = ConstraintMatrix::from_points(&[0.2, 0.2], 5, P).unwrap();
        let err = orthonormal_frame(&cm, &[1.0, 1.0], 0, P).unwrap_err();
        assert_eq!(err, Error::MustReduceRank { rank: 1, rows: 2 });
        let cm = ConstraintMatrix::from_points(&[0.1, 0.2, 0.3, 0.4], 2, P).unwrap();
        assert!(matches!(orthonormal_frame(&cm, &[1.0; 4], 0, P), Err(Error::TooManyConstraints { .. })));
    }
}
