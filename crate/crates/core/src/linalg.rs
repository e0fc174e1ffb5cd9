//! Dense linear algebra for standardizing multivariate samples.
//!
//! Everything here works on small `d x d` matrices (d is the data dimension) and
//! on `n x d` data matrices. The sample covariance uses divisor `n`, not `n - 1`,
//! and every matrix square root is the unique *symmetric* root, obtained from a
//! cyclic Jacobi eigendecomposition.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row-major storage.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix storage has wrong length");
        Self { rows, cols, data }
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        for (o, row) in out.iter_mut().zip(self.row_iter()) {
            *o = dot(row, v);
        }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.rows {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Determinant by partial-pivoting LU; intended for small matrices.
    pub fn determinant(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .unwrap();
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for k in 0..n {
                    a.swap(c * n + k, p * n + k);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for r in c + 1..n {
                let f = a[r * n + c] / piv;
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in self.row_iter() {
            writeln!(f, "  {:?}", r)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// `V f(Λ) Vᵀ` for a scalar function applied to the eigenvalues.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let d = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let s: f64 = (0..d).map(|k| v[(i, k)] * fv[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn symmetric_eigen(m: &Matrix) -> SymmetricEigen {
    assert_eq!(m.rows(), m.cols(), "eigendecomposition needs a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    // symmetrize away rounding noise in the input
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = Matrix::identity(n);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    SymmetricEigen { values, vectors }
}

/// A symmetric positive definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPd(Matrix);

impl SymmetricPd {
    /// Validates symmetry (1e-12 relative) and the singularity threshold
    /// `min eigenvalue > d * eps * max eigenvalue`.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() || m.rows() == 0 {
            return Err(Error::InvalidSample(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_symmetric(1e-12) {
            return Err(Error::InvalidSample("matrix is not symmetric".into()));
        }
        let eig = symmetric_eigen(&m);
        check_definite(&eig)?;
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }

    /// Symmetric square root.
    pub fn sqrt(&self) -> SymmetricPd {
        let eig = symmetric_eigen(&self.0);
        SymmetricPd(eig.reconstruct_with(f64::sqrt))
    }

    /// Symmetric inverse square root.
    pub fn inv_sqrt(&self) -> Result<SymmetricPd> {
        sym_inv_sqrt(self)
    }
}

fn check_definite(eig: &SymmetricEigen) -> Result<()> {
    let d = eig.values.len();
    let min = eig.values[0];
    let max = eig.values[d - 1];
    if !(min > d as f64 * f64::EPSILON * max) || !max.is_finite() {
        return Err(Error::SingularCovariance {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    Ok(())
}

/// Symmetric inverse square root `R` with `R m R = I`.
pub fn sym_inv_sqrt(m: &SymmetricPd) -> Result<SymmetricPd> {
    let eig = symmetric_eigen(m.matrix());
    check_definite(&eig)?;
    Ok(SymmetricPd(eig.reconstruct_with(|l| 1.0 / l.sqrt())))
}

/// An `n x d` data matrix, rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Matrix);

impl Sample {
    /// Requires finite entries and `n >= d + 1`.
    pub fn new(data: Matrix) -> Result<Self> {
        let (n, d) = (data.rows(), data.cols());
        if d == 0 {
            return Err(Error::InvalidSample("dimension must be at least 1".into()));
        }
        if n < d + 1 {
            return Err(Error::InvalidSample(format!(
                "need n >= d + 1 observations, got n = {n}, d = {d}"
            )));
        }
        if let Some(pos) = data.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "non-finite entry at row {}, column {}",
                pos / d + 1,
                pos % d + 1
            )));
        }
        Ok(Self(data))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        if rows.iter().any(|r| r.as_ref().len() != rows[0].as_ref().len()) {
            return Err(Error::InvalidSample("rows have different lengths".into()));
        }
        Self::new(Matrix::from_rows(rows))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn d(&self) -> usize {
        self.0.cols()
    }

    pub fn data(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Applies `x -> A x + b` to every row.
    pub fn affine_map(&self, a: &Matrix, b: &[f64]) -> Result<Sample> {
        let (n, d) = (self.n(), self.d());
        let mut out = Matrix::zeros(n, d);
        for i in 0..n {
            a.mul_vec_into(self.0.row(i), out.row_mut(i));
            for (o, bi) in out.row_mut(i).iter_mut().zip(b) {
                *o += bi;
            }
        }
        Sample::new(out)
    }
}

/// Where a residual matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualSource {
    /// Centered and whitened by the sample mean and covariance.
    IidStandardized,
    /// `Σ̃_j^{-1/2} X_j` from a fitted CCC-GARCH model; not re-standardized.
    GarchResidual,
}

/// Residual vectors the test statistic is evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledResiduals {
    y: Matrix,
    source: ResidualSource,
}

impl ScaledResiduals {
    pub fn new(y: Matrix, source: ResidualSource) -> Self {
        Self { y, source }
    }

    /// Wraps an arbitrary matrix as if it were already standardized.
    ///
    /// Used for synthetic inputs (e.g. the all-zero configuration) and for
    /// feeding raw residual matrices straight into the statistic.
    pub fn from_raw(y: Matrix) -> Self {
        Self::new(y, ResidualSource::IidStandardized)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.y
    }

    pub fn source(&self) -> ResidualSource {
        self.source
    }

    pub fn n(&self) -> usize {
        self.y.rows()
    }

    pub fn d(&self) -> usize {
        self.y.cols()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.y.row_iter()
    }

    /// Gram matrix `{y_iᵀ y_j}`.
    pub fn gram(&self) -> Matrix {
        let n = self.n();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(self.y.row(i), self.y.row(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }
}

/// Sample mean and covariance (divisor `n`).
pub fn sample_mean_cov(s: &Sample) -> Result<(Vec<f64>, SymmetricPd)> {
    let (n, d) = (s.n(), s.d());
    let data = s.data();
    let mut mean = vec![0.0; d];
    for (k, m) in mean.iter_mut().enumerate() {
        *m = (0..n).map(|i| data[(i, k)]).collect::<CompensatedSum>().value() / n as f64;
    }
    let mut cov = Matrix::zeros(d, d);
    for a in 0..d {
        for b in 0..=a {
            let v = (0..n)
                .map(|i| (data[(i, a)] - mean[a]) * (data[(i, b)] - mean[b]))
                .collect::<CompensatedSum>()
                .value()
                / n as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let eig = symmetric_eigen(&cov);
    check_definite(&eig)?;
    Ok((mean, SymmetricPd(cov)))
}

/// Scaled residuals `Y_j = S_n^{-1/2} (X_j - mean)`.
pub fn scale_residuals(s: &Sample) -> Result<ScaledResiduals> {
    let (mean, cov) = sample_mean_cov(s)?;
    let w = sym_inv_sqrt(&cov)?;
    let (n, d) = (s.n(), s.d());
    let mut y = Matrix::zeros(n, d);
    let mut centered = vec![0.0; d];
    for i in 0..n {
        for ((c, x), m) in centered.iter_mut().zip(s.data().row(i)).zip(&mean) {
            *c = x - m;
        }
        w.matrix().mul_vec_into(&centered, y.row_mut(i));
    }
    Ok(ScaledResiduals::new(y, ResidualSource::IidStandardized))
}
