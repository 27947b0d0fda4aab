//! Small dense linear algebra over [`Real`].
//!
//! Matrices here are at most a few hundred rows, so everything is plain
//! row-major storage with textbook algorithms: cyclic Jacobi for symmetric
//! eigenproblems (relative accuracy on graded positive semidefinite input),
//! Householder QR and tridiagonalization, and LU with partial pivoting.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Real> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize, prec: Precision) -> Self {
        Matrix { rows, cols, data: vec![R::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: Precision) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = R::one(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = self[(i, 0)].clone() * &other[(0, j)];
            for k in 1..self.cols {
                acc += self[(i, k)].clone() * &other[(k, j)];
            }
            acc
        })
    }

    pub fn matvec(&self, x: &[R]) -> Vec<R> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ · x`.
    pub fn tr_matvec(&self, x: &[R]) -> Vec<R> {
        assert_eq!(self.rows, x.len(), "tr_matvec dimension mismatch");
        (0..self.cols)
            .map(|j| {
                let mut acc = self[(0, j)].clone() * &x[0];
                for i in 1..self.rows {
                    acc += self[(i, j)].clone() * &x[i];
                }
                acc
            })
            .collect()
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// `xᵀ · self · x` for square `self`.
    pub fn quadratic_form(&self, x: &[R]) -> R {
        dot(x, &self.matvec(x))
    }

    /// Replaces the matrix with `(A + Aᵀ)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let two = self[(i, j)].lit(2.0);
                let avg = (self[(i, j)].clone() + &self[(j, i)]) / two;
                self[(i, j)] = avg.clone();
                self[(j, i)] = avg;
            }
        }
    }

    pub fn trace(&self) -> R {
        let mut acc = self[(0, 0)].clone();
        for i in 1..self.rows.min(self.cols) {
            acc += &self[(i, i)];
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a.clone() - b).abs().to_f64()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs().to_f64()).fold(0.0, f64::max)
    }

    pub fn map<S>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<R> Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<R> IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    assert!(!a.is_empty(), "dot of empty vectors");
    let mut acc = a[0].clone() * &b[0];
    for (x, y) in a.iter().zip(b).skip(1) {
        acc += x.clone() * y;
    }
    acc
}

pub fn norm<R: Real>(a: &[R]) -> R {
    dot(a, a).sqrt()
}

pub fn sub<R: Real>(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y).collect()
}

pub fn scale<R: Real>(a: &[R], s: &R) -> Vec<R> {
    a.iter().map(|x| x.clone() * s).collect()
}

pub fn max_abs<R: Real>(a: &[R]) -> f64 {
    a.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<R> {
    /// Ascending.
    pub values: Vec<R>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix<R>,
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Cyclic Jacobi eigenvalue algorithm.
///
/// Off-diagonal entries are annihilated until `|a_pq| <= eps * sqrt(|a_pp a_qq|)`,
/// which gives small eigenvalues to high relative accuracy when the input is
/// positive semidefinite and graded.
pub fn symmetric_eigen<R: Real>(input: &Matrix<R>, prec: Precision) -> Result<SymmetricEigen<R>> {
    assert!(input.is_square(), "eigendecomposition needs a square matrix");
    let n = input.rows();
    let mut a = input.clone();
    a.symmetrize();
    let mut v: Matrix<R> = Matrix::identity(n, prec);
    let eps = R::from_f64(prec.epsilon(), prec);
    let one = R::one(prec);
    let two = R::from_f64(2.0, prec);
    let huge = R::from_f64(1e100, prec);

    let mut converged = n < 2;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)].clone();
                if apq.is_zero() {
                    continue;
                }
                let scale = (a[(p, p)].clone() * &a[(q, q)]).abs().sqrt();
                if apq.abs() <= eps.clone() * &scale {
                    a[(p, q)] = R::zero(prec);
                    a[(q, p)] = R::zero(prec);
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)].clone() - &a[(p, p)]) / (two.clone() * &apq);
                let t = if theta.abs() > huge {
                    one.clone() / (two.clone() * &theta)
                } else {
                    let mag = one.clone() / (theta.abs() + (theta.square() + &one).sqrt());
                    if theta < R::zero(prec) {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = one.clone() / (t.square() + &one).sqrt();
                let s = t.clone() * &c;
                let tp = t.clone() * &apq;
                a[(p, p)] -= &tp;
                a[(q, q)] += &tp;
                a[(p, q)] = R::zero(prec);
                a[(q, p)] = R::zero(prec);
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)].clone();
                        let arq = a[(r, q)].clone();
                        let new_rp = c.clone() * &arp - s.clone() * &arq;
                        let new_rq = c.clone() * &arq + s.clone() * &arp;
                        a[(r, p)] = new_rp.clone();
                        a[(p, r)] = new_rp;
                        a[(r, q)] = new_rq.clone();
                        a[(q, r)] = new_rq;
                    }
                    let vrp = v[(r, p)].clone();
                    let vrq = v[(r, q)].clone();
                    v[(r, p)] = c.clone() * &vrp - s.clone() * &vrq;
                    v[(r, q)] = s.clone() * &vrp + c.clone() * &vrq;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SolverFailure(format!(
            "Jacobi eigensolver did not converge in {MAX_JACOBI_SWEEPS} sweeps (n={n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| a[(k, k)].clone()).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])].clone());
    Ok(SymmetricEigen { values, vectors })
}

/// Thin QR factorization `A = Q R` of an `m x n` matrix with `m >= n`.
#[derive(Debug, Clone)]
pub struct ThinQr<R> {
    /// `m x n`, orthonormal columns.
    pub q: Matrix<R>,
    /// `n x n`, upper triangular.
    pub r: Matrix<R>,
}

struct Reflector<R> {
    start: usize,
    v: Vec<R>,
}

impl<R: Real> Reflector<R> {
    /// Builds `H = I - 2 v vᵀ` mapping `x` onto a multiple of `e_start`.
    /// Returns `None` for a zero vector.
    fn annihilating(x: &[R], start: usize) -> Option<(Self, R)> {
        let alpha_mag = norm(x);
        if alpha_mag.is_zero() {
            return None;
        }
        let alpha = if x[0] > x[0].lit(0.0) { -alpha_mag } else { alpha_mag };
        let mut v = x.to_vec();
        v[0] -= &alpha;
        let vn = norm(&v);
        if vn.is_zero() {
            return None;
        }
        for e in v.iter_mut() {
            *e /= &vn;
        }
        Some((Reflector { start, v }, alpha))
    }

    fn apply(&self, x: &mut [R]) {
        let tail = &mut x[self.start..self.start + self.v.len()];
        let two = self.v[0].lit(2.0);
        let proj = dot(&self.v, tail) * two;
        for (t, vi) in tail.iter_mut().zip(&self.v) {
            *t -= proj.clone() * vi;
        }
    }

    fn apply_left(&self, a: &mut Matrix<R>, col_from: usize) {
        for j in col_from..a.cols() {
            let mut col = a.column(j);
            self.apply(&mut col);
            for (i, value) in col.into_iter().enumerate().skip(self.start) {
                a[(i, j)] = value;
            }
        }
    }
}

pub fn thin_qr<R: Real>(a: &Matrix<R>, prec: Precision) -> ThinQr<R> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "thin QR needs rows >= cols");
    let mut work = a.clone();
    let mut reflectors = Vec::with_capacity(n);
    for k in 0..n {
        let x: Vec<R> = (k..m).map(|i| work[(i, k)].clone()).collect();
        if let Some((h, _)) = Reflector::annihilating(&x, k) {
            h.apply_left(&mut work, k);
            reflectors.push(h);
        }
        for i in (k + 1)..m {
            work[(i, k)] = R::zero(prec);
        }
    }
    let r = Matrix::from_fn(n, n, |i, j| if i <= j { work[(i, j)].clone() } else { R::zero(prec) });
    let mut q = Matrix::zeros(m, n, prec);
    for j in 0..n {
        let mut e = vec![R::zero(prec); m];
        e[j] = R::one(prec);
        for h in reflectors.iter().rev() {
            h.apply(&mut e);
        }
        for (i, value) in e.into_iter().enumerate() {
            q[(i, j)] = value;
        }
    }
    ThinQr { q, r }
}

/// Householder reduction `A = Q T Qᵀ` of a symmetric matrix to tridiagonal `T`.
#[derive(Debug, Clone)]
pub struct Tridiagonal<R> {
    pub diag: Vec<R>,
    /// `offdiag[i] = T[i, i+1]`.
    pub offdiag: Vec<R>,
    pub q: Matrix<R>,
}

pub fn tridiagonalize<R: Real>(input: &Matrix<R>, prec: Precision) -> Tridiagonal<R> {
    assert!(input.is_square());
    let n = input.rows();
    let mut a = input.clone();
    a.symmetrize();
    let mut q = Matrix::identity(n, prec);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<R> = ((k + 1)..n).map(|i| a[(i, k)].clone()).collect();
        let Some((h, _)) = Reflector::annihilating(&x, k + 1) else {
            continue;
        };
        // A <- H A H, Q <- Q H
        h.apply_left(&mut a, 0);
        let mut at = a.transpose();
        h.apply_left(&mut at, 0);
        a = at.transpose();
        let mut qt = q.transpose();
        h.apply_left(&mut qt, 0);
        q = qt.transpose();
    }
    let diag = (0..n).map(|i| a[(i, i)].clone()).collect();
    let offdiag =
        (0..n.saturating_sub(1)).map(|i| (a[(i, i + 1)].clone() + &a[(i + 1, i)]) / a[(i, i)].lit(2.0)).collect();
    Tridiagonal { diag, offdiag, q }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve<R: Real>(a: &Matrix<R>, b: &[R]) -> Result<Vec<R>> {
    assert!(a.is_square());
    let n = a.rows();
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let pivot =
            (k..n).max_by(|&i, &j| m[(i, k)].abs().partial_cmp(&m[(j, k)].abs()).expect("finite")).expect("non-empty");
        if m[(pivot, k)].is_zero() {
            return Err(Error::SolverFailure("singular linear system".into()));
        }
        if pivot != k {
            for j in 0..n {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(pivot, j)].clone();
                m[(pivot, j)] = tmp;
            }
            x.swap(k, pivot);
        }
        for i in (k + 1)..n {
            let factor = m[(i, k)].clone() / &m[(k, k)];
            if factor.is_zero() {
                continue;
            }
            for j in k..n {
                let delta = factor.clone() * &m[(k, j)];
                m[(i, j)] -= delta;
            }
            let delta = factor * &x[k];
            x[i] -= delta;
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i].clone();
        for j in (i + 1)..n {
            acc -= m[(i, j)].clone() * &x[j];
        }
        x[i] = acc / &m[(i, i)];
    }
    Ok(x)
}

/// Solves `Lᵀ`-style system `Uᵀ x = b` for upper-triangular `U`.
pub fn solve_upper_transposed<R: Real>(u: &Matrix<R>, b: &[R]) -> Vec<R> {
    let n = u.rows();
    let mut x: Vec<R> = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = b[i].clone();
        for (j, xj) in x.iter().enumerate() {
            acc -= u[(j, i)].clone() * xj;
        }
        x.push(acc / &u[(i, i)]);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::MpReal;

    fn hilbert(n: usize) -> Matrix<f64> {
        Matrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let a = hilbert(6);
        let eig = symmetric_eigen(&a, Precision::FAST).unwrap();
        let d = Matrix::from_fn(6, 6, |i, j| if i == j { eig.values[i] } else { 0.0 });
        let back = eig.vectors.matmul(&d).matmul(&eig.vectors.transpose());
        assert!(back.max_abs_diff(&a) < 1e-14);
        let vtv = eig.vectors.transpose().matmul(&eig.vectors);
        assert!(vtv.max_abs_diff(&Matrix::identity(6, Precision::FAST)) < 1e-14);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jacobi_small_eigenvalues_are_relatively_accurate() {
        // smallest eigenvalue of the 8x8 Hilbert matrix
        let p = Precision::new(60).unwrap();
        let a = Matrix::from_fn(8, 8, |i, j| MpReal::one(p) / MpReal::from_usize(i + j + 1, p));
        let eig = symmetric_eigen(&a, p).unwrap();
        let smallest = eig.values[0].to_f64();
        assert!((smallest - 1.111538966372442e-10).abs() / 1.111538966372442e-10 < 1e-12);
    }

    #[test]
    fn thin_qr_factors() {
        let a = Matrix::from_fn(5, 3, |i, j| ((i * 3 + j) as f64).sin() + if i == j { 2.0 } else { 0.0 });
        let qr = thin_qr(&a, Precision::FAST);
        assert!(qr.q.matmul(&qr.r).max_abs_diff(&a) < 1e-14);
        let qtq = qr.q.transpose().matmul(&qr.q);
        assert!(qtq.max_abs_diff(&Matrix::identity(3, Precision::FAST)) < 1e-14);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(qr.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn tridiagonal_similarity() {
        let a = hilbert(5);
        let t = tridiagonalize(&a, Precision::FAST);
        let tm = Matrix::from_fn(5, 5, |i, j| {
            if i == j {
                t.diag[i]
            } else if j == i + 1 {
                t.offdiag[i]
            } else if i == j + 1 {
                t.offdiag[j]
            } else {
                0.0
            }
        });
        let back = t.q.matmul(&tm).matmul(&t.q.transpose());
        assert!(back.max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn lu_solves_and_flags_singular() {
        let a = Matrix::from_rows(vec![vec![0.0, 2.0], vec![3.0, 1.0]]);
        let x = lu_solve(&a, &[4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let s = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(lu_solve(&s, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn upper_transposed_solve() {
        let u = Matrix::from_rows(vec![vec![2.0, 1.0], vec![0.0, 4.0]]);
        // Uᵀ = [[2,0],[1,4]]
        let x = solve_upper_transposed(&u, &[2.0, 9.0]);
        assert_eq!(x, vec![1.0, 2.0]);
    }
}
