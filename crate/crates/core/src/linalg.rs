//! Dense linear-algebra kernels.
//!
//! [`Matrix`] is a row-major `f64` array. Products go through
//! `matrixmultiply` (single-threaded, so results are bitwise reproducible for
//! a fixed build); the thin SVD and QR are delegated to `nalgebra`. Cholesky,
//! the numerical rank and the spectral-norm estimate are implemented here.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance used by [`numerical_rank`] when the caller has no
/// better value.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            let row = self.row(i);
            let shown: Vec<String> = row.iter().take(8).map(|v| format!("{v:.6e}")).collect();
            writeln!(f, "  [{}{}]", shown.join(", "), if self.cols > 8 { ", .." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ..")?;
        }
        Ok(())
    }
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DataLength { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::dim("from_rows", (n_rows, n_cols), (1, r.len())));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(n_rows, n_cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 1.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Matrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Column vector `len x 1`.
    pub fn column(values: Vec<f64>) -> Self {
        Matrix { rows: values.len(), cols: 1, data: values }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data: out }
    }

    /// Reinterprets the data with a new shape of equal size.
    pub fn reshape(self, rows: usize, cols: usize) -> Result<Matrix> {
        if rows * cols != self.data.len() {
            return Err(Error::dim("reshape", self.shape(), (rows, cols)));
        }
        Ok(Matrix { rows, cols, data: self.data })
    }

    /// Leading `k` columns.
    pub fn leading_cols(&self, k: usize) -> Matrix {
        let k = k.min(self.cols);
        Matrix::from_fn(self.rows, k, |i, j| self.get(i, j))
    }

    /// Leading `k` rows.
    pub fn leading_rows(&self, k: usize) -> Matrix {
        let k = k.min(self.rows);
        Matrix { rows: k, cols: self.cols, data: self.data[..k * self.cols].to_vec() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        self.map(|v| v * s)
    }

    pub fn scale_mut(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Frobenius inner product `<self, other>`.
    pub fn inner(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "inner product shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Column-stacked vectorization, returned as an `(rows*cols) x 1` matrix.
    pub fn vec_columns(&self) -> Matrix {
        let t = self.transpose();
        Matrix { rows: t.data.len(), cols: 1, data: t.data }
    }

    /// Inverse of [`Matrix::vec_columns`].
    pub fn from_column_stack(values: &[f64], rows: usize, cols: usize) -> Result<Matrix> {
        if values.len() != rows * cols {
            return Err(Error::dim("from_column_stack", (values.len(), 1), (rows, cols)));
        }
        Ok(Matrix { rows: cols, cols: rows, data: values.to_vec() }.transpose())
    }

    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix> {
        hadamard(self, other)
    }

    /// `self * other`
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dim("matmul", self.shape(), other.shape()));
        }
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let data = gemm(m, k, n, &self.data, (k as isize, 1), &other.data, (n as isize, 1));
        Ok(Matrix { rows: m, cols: n, data })
    }

    /// `self * other^T`
    pub fn matmul_nt(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::dim("matmul_nt", self.shape(), other.shape()));
        }
        let (m, k, n) = (self.rows, self.cols, other.rows);
        let data = gemm(m, k, n, &self.data, (k as isize, 1), &other.data, (1, k as isize));
        Ok(Matrix { rows: m, cols: n, data })
    }

    /// `self^T * other`
    pub fn matmul_tn(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::dim("matmul_tn", self.shape(), other.shape()));
        }
        let (m, k, n) = (self.cols, self.rows, other.cols);
        let data = gemm(m, k, n, &self.data, (1, m as isize), &other.data, (n as isize, 1));
        Ok(Matrix { rows: m, cols: n, data })
    }

    /// `self * x` for a plain vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec length mismatch");
        self.data.chunks_exact(self.cols).map(|row| dot(row, x)).collect()
    }

    /// `self^T * y` for a plain vector.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "matvec_t length mismatch");
        let mut out = vec![0.0; self.cols];
        for (row, &yi) in self.data.chunks_exact(self.cols).zip(y) {
            if yi != 0.0 {
                for (o, a) in out.iter_mut().zip(row) {
                    *o += yi * a;
                }
            }
        }
        out
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    a_strides: (isize, isize),
    b: &[f64],
    b_strides: (isize, isize),
) -> Vec<f64> {
    let mut c = vec![0.0; m * n];
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: the strides describe row-major or transposed views that stay
    // inside `a` (m x k) and `b` (k x n); `c` is a fresh m x n row-major buffer.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            a_strides.0,
            a_strides.1,
            b.as_ptr(),
            b_strides.0,
            b_strides.1,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
    c
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // eight independent partial sums let the loop vectorize; the summation
    // order is fixed, so results stay reproducible
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[inline]
fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

macro_rules! elementwise_op {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                assert_eq!(self.shape(), rhs.shape(), concat!(stringify!($method), " shape mismatch"));
                Matrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr<Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                (&self).$method(rhs)
            }
        }
    };
}

elementwise_op!(Add, add, +);
elementwise_op!(Sub, sub, -);

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &Matrix {
    type Output = Matrix;
    fn mul(self, s: f64) -> Matrix {
        self.scale(s)
    }
}

impl Mul<f64> for Matrix {
    type Output = Matrix;
    fn mul(mut self, s: f64) -> Matrix {
        self.scale_mut(s);
        self
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    // Scaled accumulation avoids overflow for entries near f64::MAX.
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = a.data.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * sum.sqrt()
}

pub fn hadamard(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.shape() != b.shape() {
        return Err(Error::dim("hadamard", a.shape(), b.shape()));
    }
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

/// Cholesky factor `G = L L^T` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // lower triangle, row-major
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(g: &Matrix) -> Result<Cholesky> {
        if g.rows != g.cols {
            return Err(Error::dim("cholesky", g.shape(), (g.cols, g.cols)));
        }
        let n = g.rows;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let diag = g.get(j, j) - dot(&l[j * n..j * n + j], &l[j * n..j * n + j]);
            if !(diag > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: diag });
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let s = g.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `G x = b` in place.
    pub fn solve_vec_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let s = b[i] - dot(&self.l[i * n..i * n + i], &b[..i]);
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `G Y = B`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows != self.n {
            return Err(Error::dim("spd_solve", (self.n, self.n), b.shape()));
        }
        let mut bt = b.transpose();
        for col in bt.data.chunks_exact_mut(self.n) {
            self.solve_vec_in_place(col);
        }
        Ok(bt.transpose())
    }

    /// Solves `Y G = C`, i.e. returns `C G^{-1}` (G is symmetric).
    pub fn solve_right(&self, c: &Matrix) -> Result<Matrix> {
        if c.cols != self.n {
            return Err(Error::dim("spd_solve_right", c.shape(), (self.n, self.n)));
        }
        let mut y = c.clone();
        for row in y.data.chunks_exact_mut(self.n) {
            self.solve_vec_in_place(row);
        }
        Ok(y)
    }
}

/// Solves `G Y = B` for symmetric positive definite `G` by Cholesky.
pub fn spd_solve(g: &Matrix, b: &Matrix) -> Result<Matrix> {
    Cholesky::factor(g)?.solve(b)
}

/// Thin SVD `A = left * diag(values) * right^T` with `values` nonincreasing.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// `m x k` with orthonormal columns.
    pub left: Matrix,
    pub values: Vec<f64>,
    /// `n x k` with orthonormal columns.
    pub right: Matrix,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|s| s)
    }

    /// `left * diag(f(values)) * right^T`, skipping zeroed triples.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let (m, n) = (self.left.rows, self.right.rows);
        let kept: Vec<(usize, f64)> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, f(s)))
            .filter(|&(_, s)| s != 0.0)
            .collect();
        if kept.is_empty() {
            return Matrix::zeros(m, n);
        }
        let scaled_left =
            Matrix::from_fn(m, kept.len(), |i, j| self.left.get(i, kept[j].0) * kept[j].1);
        let right = Matrix::from_fn(n, kept.len(), |i, j| self.right.get(i, kept[j].0));
        scaled_left.matmul_nt(&right).expect("shapes agree by construction")
    }
}

pub fn thin_svd(a: &Matrix) -> Result<ThinSvd> {
    let (m, n) = a.shape();
    let k = m.min(n);
    if a.is_zero() {
        let left = Matrix::from_fn(m, k, |i, j| if i == j { 1.0 } else { 0.0 });
        let right = Matrix::from_fn(n, k, |i, j| if i == j { 1.0 } else { 0.0 });
        return Ok(ThinSvd { left, values: vec![0.0; k], right });
    }
    let svd = nalgebra::SVD::try_new(a.to_nalgebra(), true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdNoConvergence { rows: m, cols: n })?;
    let u = svd.u.as_ref().ok_or(Error::SvdNoConvergence { rows: m, cols: n })?;
    let vt = svd.v_t.as_ref().ok_or(Error::SvdNoConvergence { rows: m, cols: n })?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
    let left = Matrix::from_fn(m, k, |i, j| u[(i, order[j])]);
    let right = Matrix::from_fn(n, k, |i, j| vt[(order[j], i)]);
    Ok(ThinSvd { left, values, right })
}

pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    if a.is_zero() {
        return Ok(vec![0.0; a.rows.min(a.cols)]);
    }
    let mut values = nalgebra::SVD::try_new(a.to_nalgebra(), false, false, f64::EPSILON, 0)
        .ok_or(Error::SvdNoConvergence { rows: a.rows, cols: a.cols })?
        .singular_values
        .as_slice()
        .to_vec();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Counts singular values strictly above `rel_tol * sigma_1`.
pub fn numerical_rank(a: &Matrix, rel_tol: f64) -> Result<usize> {
    check_rank_tol(rel_tol)?;
    Ok(rank_from_values(&singular_values(a)?, rel_tol))
}

pub(crate) fn check_rank_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance must lie in (0,1), got {rel_tol}")));
    }
    Ok(())
}

pub(crate) fn rank_from_values(values: &[f64], rel_tol: f64) -> usize {
    match values.first() {
        Some(&top) if top > 0.0 => values.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}

/// Thin QR of a tall matrix (`rows >= cols`): `a = q * r`.
pub fn thin_qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    if a.rows < a.cols {
        return Err(Error::InvalidArgument(format!(
            "thin QR needs rows >= cols, got {}x{}",
            a.rows, a.cols
        )));
    }
    let qr = a.to_nalgebra().qr();
    Ok((Matrix::from_nalgebra(&qr.q()), Matrix::from_nalgebra(&qr.r())))
}

/// Largest singular value, from a Lanczos process on the smaller Gram
/// operator (`A^T A` or `A A^T`) with full reorthogonalization.
pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let gram_dim = a.rows.min(a.cols);
    let apply = |x: &[f64]| -> Vec<f64> {
        if a.cols <= a.rows {
            a.matvec_t(&a.matvec(x))
        } else {
            a.matvec(&a.matvec_t(x))
        }
    };
    let max_steps = gram_dim.min(400);

    // Fixed, well-spread start vector: deterministic without an RNG.
    let mut q: Vec<f64> = (0..gram_dim).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).sin()).collect();
    let qn = norm2(&q);
    q.iter_mut().for_each(|v| *v /= qn);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_steps);
    let mut alphas = Vec::with_capacity(max_steps);
    let mut betas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut estimate = 0.0_f64;
    let mut stable_steps = 0;

    for step in 0..max_steps {
        let mut w = apply(&q);
        let alpha = dot(&w, &q);
        alphas.push(alpha);
        basis.push(q.clone());
        // Full reorthogonalization, applied twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let beta = norm2(&w);
        let top = tridiagonal_max_eigenvalue(&alphas, &betas);
        let converged = step > 0 && (top - estimate).abs() <= 1e-14 * top;
        estimate = top;
        stable_steps = if converged { stable_steps + 1 } else { 0 };
        if beta <= 1e-14 * top.max(f64::MIN_POSITIVE) || stable_steps >= 3 {
            break;
        }
        betas.push(beta);
        q = w.into_iter().map(|v| v / beta).collect();
    }
    estimate.max(0.0).sqrt()
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta` (`beta.len() >= alpha.len() - 1`), by
/// Sturm-count bisection.
fn tridiagonal_max_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let n = alpha.len();
    let off = |i: usize| if i < n - 1 { beta[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(alpha[i] - radius);
        hi = hi.max(alpha[i] + radius);
    }
    // number of eigenvalues strictly less than x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..n {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
