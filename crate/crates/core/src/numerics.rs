//! Dense real-matrix kernel.
//!
//! A minimal row-major `f64` matrix with the four operations every solver in
//! this crate needs: linear solves, full inversion, spectral-radius
//! estimation, and geometric series of applied operators. Factorization is
//! LU with partial pivoting — the model operators stay in the low hundreds
//! of rows, so robustness wins over speed. A pivot at or below
//! `1e-12 * ||A||_inf` is reported as [`Error::SingularMatrix`].
//!
//! Everything here is a pure function of its inputs; values are immutable
//! after construction and safe to share across threads.

use crate::error::{Error, Result};

/// Relative pivot threshold below which elimination reports singularity.
pub const SINGULARITY_RTOL: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from row slices; panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        assert!(r > 0, "matrix needs at least one row");
        let c = rows[0].len();
        DenseMatrix::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            rows[i][j]
        })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
        }
        m
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn mul_mat(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Returns `self + factor * other`.
    pub fn add_scaled(&self, other: &DenseMatrix, factor: f64) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, x) in out.data.iter_mut().zip(&other.data) {
            *o += factor * x;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= factor;
        }
        out
    }

    pub fn max_symmetry_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn inf_norm_vec(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        assert!(a.is_square(), "LU factorization requires a square matrix");
        let n = a.rows();
        let threshold = SINGULARITY_RTOL * a.inf_norm();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let (pivot_row, pivot) = (col..n)
                .map(|r| (r, lu[(r, col)].abs()))
                .fold((col, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold {
                return Err(Error::SingularMatrix {
                    column: col,
                    pivot,
                    threshold,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(col, pivot_row);
            }
            let diag = lu[(col, col)];
            for r in (col + 1)..n {
                let factor = lu[(r, col)] / diag;
                lu[(r, col)] = factor;
                for j in (col + 1)..n {
                    let sub = factor * lu[(col, j)];
                    lu[(r, j)] -= sub;
                }
            }
        }
        Ok(LuFactors { lu, perm })
    }

    pub fn n(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b` from the stored factors.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // Forward: L y = P b (unit lower triangle).
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // Backward: U x = y.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.n();
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for col in 0..n {
            e[col] = 1.0;
            let x = self.solve(&e);
            e[col] = 0.0;
            for row in 0..n {
                inv[(row, col)] = x[row];
            }
        }
        inv
    }
}

/// Solves `A x = b` with partial-pivoting elimination.
pub fn solve_linear(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but rhs has length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    Ok(LuFactors::new(a)?.solve(b))
}

/// Full inverse by column-wise solves.
pub fn invert(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(LuFactors::new(a)?.inverse())
}

/// Outcome of a spectral-radius estimate.
#[derive(Debug, Clone, Copy)]
pub struct SpectralRadius {
    pub value: f64,
    /// False when `max_iter` was exhausted with an oscillating Rayleigh
    /// quotient; the estimate is still the best one seen.
    pub converged: bool,
    pub iterations: usize,
}

/// Dominant eigenvalue magnitude by power iteration.
///
/// Starts from the all-ones vector; if the Rayleigh quotient stagnates at
/// zero, retries once from ones plus the first basis vector. If the quotient
/// oscillates (paired eigenvalues of equal magnitude), falls back to power
/// iteration on `A*A` and reports the square root.
pub fn spectral_radius(a: &DenseMatrix, tol: f64, max_iter: usize) -> SpectralRadius {
    assert!(a.is_square(), "spectral radius requires a square matrix");
    assert!(tol > 0.0, "tolerance must be positive");
    let n = a.rows();

    let ones = vec![1.0; n];
    let mut perturbed = vec![1.0; n];
    perturbed[0] += 1.0;

    let first = power_iterate(a, &ones, tol, max_iter);
    if first.accepted() && !first.stagnated_at_zero {
        return first.into();
    }
    if first.stagnated_at_zero {
        let retry = power_iterate(a, &perturbed, tol, max_iter);
        if retry.accepted() {
            return retry.into();
        }
    }

    // Equal-magnitude pair: iterate the squared operator instead.
    let squared = a.mul_mat(a);
    let mut sq = power_iterate(&squared, &ones, tol, max_iter);
    if sq.stagnated_at_zero {
        sq = power_iterate(&squared, &perturbed, tol, max_iter);
    }
    if sq.accepted() {
        return SpectralRadius {
            value: sq.value.abs().sqrt(),
            converged: true,
            iterations: sq.iterations,
        };
    }

    let best = [&first, &sq]
        .iter()
        .map(|r| r.value.abs())
        .fold(0.0, f64::max);
    SpectralRadius {
        value: if sq.value.abs() > 0.0 {
            sq.value.abs().sqrt()
        } else {
            best
        },
        converged: false,
        iterations: first.iterations + sq.iterations,
    }
}

struct PowerOutcome {
    value: f64,
    converged: bool,
    residual_ok: bool,
    stagnated_at_zero: bool,
    iterations: usize,
}

impl PowerOutcome {
    fn accepted(&self) -> bool {
        self.converged && self.residual_ok
    }
}

impl From<PowerOutcome> for SpectralRadius {
    fn from(p: PowerOutcome) -> SpectralRadius {
        SpectralRadius {
            value: p.value.abs(),
            converged: p.converged && p.residual_ok,
            iterations: p.iterations,
        }
    }
}

fn power_iterate(a: &DenseMatrix, start: &[f64], tol: f64, max_iter: usize) -> PowerOutcome {
    let mut v = start.to_vec();
    let scale = inf_norm_vec(&v);
    for x in v.iter_mut() {
        *x /= scale;
    }

    let mut lambda_prev = f64::NAN;
    let mut lambda = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=max_iter {
        iterations = it;
        let w = a.mul_vec(&v);
        let norm_w = inf_norm_vec(&w);
        if norm_w == 0.0 {
            // v landed in the null space; signal stagnation so the caller
            // can retry from a different start.
            return PowerOutcome {
                value: 0.0,
                converged: true,
                residual_ok: true,
                stagnated_at_zero: true,
                iterations,
            };
        }
        lambda = dot(&v, &w) / dot(&v, &v);
        for (x, y) in v.iter_mut().zip(&w) {
            *x = y / norm_w;
        }
        if lambda_prev.is_finite()
            && (lambda - lambda_prev).abs() <= tol * lambda.abs().max(1.0)
        {
            converged = true;
            break;
        }
        lambda_prev = lambda;
    }

    // A stable Rayleigh quotient is only trusted if v is near an actual
    // eigenvector; equal-magnitude pairs stabilize the quotient while the
    // iterate keeps rotating.
    let w = a.mul_vec(&v);
    let mut residual = 0.0f64;
    for i in 0..v.len() {
        residual = residual.max((w[i] - lambda * v[i]).abs());
    }
    let residual_ok = residual <= tol.sqrt() * lambda.abs().max(1.0);
    let stagnated_at_zero = converged && lambda.abs() <= tol && !residual_ok;

    PowerOutcome {
        value: lambda,
        converged,
        residual_ok,
        stagnated_at_zero,
        iterations,
    }
}

/// Whether a symmetric matrix is positive definite, by attempting a
/// Cholesky factorization.
///
/// For the model operators this doubles as an exact contraction test: with
/// `D = diag(2 b_i + c)`, the transition `D M^-1` is similar to the
/// symmetric `D^(1/2) M^-1 D^(1/2)`, whose spectrum lies in `(0, 1)` exactly
/// when both `M` and `M - D` are positive definite.
pub fn is_positive_definite(a: &DenseMatrix) -> bool {
    assert!(a.is_square(), "definiteness requires a square matrix");
    let n = a.rows();
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// Sums the operator geometric series `sum_{k>=0} A^k b` term by term.
///
/// Stops once the latest term falls below `tol` relative to the running sum;
/// errors with [`Error::SeriesDiverged`] if `max_terms` is exhausted first.
pub fn geometric_series_apply(
    a: &DenseMatrix,
    b: &[f64],
    tol: f64,
    max_terms: usize,
) -> Result<Vec<f64>> {
    assert_eq!(a.cols(), b.len(), "dimension mismatch");
    let mut sum = b.to_vec();
    let mut term = b.to_vec();
    for _ in 0..max_terms {
        term = a.mul_vec(&term);
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        if inf_norm_vec(&term) <= tol * inf_norm_vec(&sum).max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesDiverged { terms: max_terms })
}
