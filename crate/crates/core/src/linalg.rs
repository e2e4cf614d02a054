//! Dense row-major matrices and Householder QR least squares.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from column vectors of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
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

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ v`
    pub fn tmatvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    /// Largest absolute elementwise difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, libm::fabs(a - b)))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..i).all(|j| libm::fabs(self[(i, j)] - self[(j, i)]) <= tol)
            })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of a Householder factorisation that failed the rank check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDeficiency {
    pub column: usize,
}

/// Thin QR factorisation `X = Q R` by Householder reflections.
///
/// Reflectors are kept in compact form below the diagonal of `qr`,
/// `R` on and above it.
#[derive(Debug, Clone)]
pub struct Qr {
    qr: Matrix,
    tau: Vec<f64>,
    r_diag: Vec<f64>,
}

impl Qr {
    /// Factorises `x` (n ≥ k). A column is declared dependent when its
    /// diagonal entry of `R` falls below `rel_tol` times the largest
    /// column norm of `x`.
    pub fn new(x: &Matrix, rel_tol: f64) -> Result<Self, RankDeficiency> {
        let (n, k) = (x.rows(), x.cols());
        assert!(n >= k, "QR requires at least as many rows as columns");
        let mut a = x.clone();
        let max_norm = (0..k)
            .map(|j| libm::sqrt((0..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>()))
            .fold(0.0, f64::max);
        let threshold = rel_tol * max_norm;
        let mut tau = vec![0.0; k];
        let mut r_diag = vec![0.0; k];

        for j in 0..k {
            let norm = libm::sqrt((j..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>());
            if norm <= threshold || norm == 0.0 {
                return Err(RankDeficiency { column: j });
            }
            let alpha = if a[(j, j)] > 0.0 { -norm } else { norm };
            // v = x - alpha e1, normalised so v[0] = 1
            let v0 = a[(j, j)] - alpha;
            for i in j + 1..n {
                a[(i, j)] /= v0;
            }
            tau[j] = -v0 / alpha;
            r_diag[j] = alpha;
            a[(j, j)] = 1.0;
            for c in j + 1..k {
                let s: f64 = (j..n).map(|i| a[(i, j)] * a[(i, c)]).sum::<f64>() * tau[j];
                for i in j..n {
                    a[(i, c)] -= s * a[(i, j)];
                }
            }
            a[(j, j)] = alpha;
        }
        Ok(Self { qr: a, tau, r_diag })
    }

    /// `Qᵀ y`, full length n.
    pub fn qt_mul(&self, y: &[f64]) -> Vec<f64> {
        let (n, k) = (self.qr.rows(), self.qr.cols());
        assert_eq!(y.len(), n);
        let mut out = y.to_vec();
        for j in 0..k {
            let mut s = out[j];
            for i in j + 1..n {
                s += self.qr[(i, j)] * out[i];
            }
            s *= self.tau[j];
            out[j] -= s;
            for i in j + 1..n {
                out[i] -= s * self.qr[(i, j)];
            }
        }
        out
    }

    /// Least-squares solution of `X b ≈ y`.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let k = self.qr.cols();
        let qty = self.qt_mul(y);
        let mut b = vec![0.0; k];
        for j in (0..k).rev() {
            let mut s = qty[j];
            for c in j + 1..k {
                s -= self.r(j, c) * b[c];
            }
            b[j] = s / self.r_diag[j];
        }
        b
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.r_diag[i]
        } else {
            self.qr[(i, j)]
        }
    }

    /// `(XᵀX)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub fn xtx_inverse(&self) -> Matrix {
        let k = self.qr.cols();
        // upper-triangular inverse of R by back substitution, column by column
        let mut rinv = Matrix::zeros(k, k);
        for c in 0..k {
            rinv[(c, c)] = 1.0 / self.r_diag[c];
            for i in (0..c).rev() {
                let mut s = 0.0;
                for l in i + 1..=c {
                    s += self.r(i, l) * rinv[(l, c)];
                }
                rinv[(i, c)] = -s / self.r_diag[i];
            }
        }
        let mut out = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let s: f64 = (j..k).map(|l| rinv[(i, l)] * rinv[(j, l)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}
