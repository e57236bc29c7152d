//! Dense complex linear-algebra kernels.
//!
//! Sizes in this crate are small (at most a few hundred rows), so everything
//! is a plain row-major `Vec<Complex64>` with direct O(n^2)/O(n^3) loops.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot tolerance below which a least-squares system is rejected
/// as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidDimension("ragged columns".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                entries[r]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[Complex64]) {
        assert_eq!(values.len(), self.rows);
        for (r, v) in values.iter().enumerate() {
            self[(r, c)] = *v;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidDimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::InvalidDimension(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidDimension("shape mismatch in subtraction".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius distance from `scale * I`.
    pub fn distance_from_scaled_identity(&self, scale: f64) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let target = if r == c { scale } else { 0.0 };
                acc += (self[(r, c)] - target).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// `e^{j phase}`.
#[inline]
pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Unitary n-point DFT matrix, `W[k][l] = exp(-j 2 pi k l / n) / sqrt(n)`.
pub fn dft_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("DFT size must be positive".into()));
    }
    let norm = 1.0 / (n as f64).sqrt();
    // reduce k*l mod n before forming the angle to keep it in [0, 2pi)
    Ok(ComplexMatrix::from_fn(n, n, |k, l| {
        cis(-2.0 * PI * ((k * l) % n) as f64 / n as f64) * norm
    }))
}

/// Leading `k` columns of `m`.
pub fn first_columns(m: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    if k > m.cols() {
        return Err(Error::InvalidDimension(format!(
            "requested {k} columns from a matrix with {}",
            m.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(m.rows(), k, |r, c| m[(r, c)]))
}

/// Full linear convolution, output length `a.len() + b.len() - 1`.
pub fn linear_convolve(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidDimension("convolution of an empty sequence".into()));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Ok(out)
}

/// Circular convolution of a length-`n` signal with a (shorter) impulse
/// response: `c[k] = sum_i h[i] x[(k - i) mod n]`.
pub fn circular_convolve(x: &[Complex64], h: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    if n == 0 || h.len() > n {
        return Err(Error::InvalidDimension(format!(
            "impulse response of length {} does not fit a period of {n}",
            h.len()
        )));
    }
    Ok((0..n)
        .map(|k| {
            h.iter()
                .enumerate()
                .map(|(i, hi)| hi * x[(k + n - i) % n])
                .sum()
        })
        .collect())
}

/// Circular shift downward by `k` steps: `w[i] = v[(i - k) mod len]`.
pub fn cyclic_shift(v: &[Complex64], k: i64) -> Vec<Complex64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let k = k.rem_euclid(n as i64) as usize;
    (0..n).map(|i| v[(i + n - k) % n]).collect()
}

/// Householder QR factorization with column pivoting of a tall matrix,
/// kept around to solve least-squares problems against many right-hand sides.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// Upper triangle holds `R`; the Householder vectors live in `reflectors`.
    r: ComplexMatrix,
    reflectors: Vec<(Vec<Complex64>, f64)>,
    perm: Vec<usize>,
}

impl LeastSquares {
    /// Factorizes `a`. A pivot `|R_kk|` at or below [`RANK_TOLERANCE`] times
    /// the leading pivot is reported as [`Error::SingularSystem`].
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n || n == 0 {
            return Err(Error::InvalidDimension(format!(
                "least squares needs a tall matrix, got {m}x{n}"
            )));
        }
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(n);
        let mut norms: Vec<f64> = (0..n).map(|j| (0..m).map(|i| r[(i, j)].norm_sqr()).sum()).collect();
        let mut leading = 0.0;

        for k in 0..n {
            let pivot = (k..n).fold(k, |best, j| if norms[j] > norms[best] { j } else { best });
            if pivot != k {
                for i in 0..m {
                    r.data.swap(i * n + k, i * n + pivot);
                }
                perm.swap(k, pivot);
                norms.swap(k, pivot);
            }
            // recompute the pivot column norm exactly, the downdated one drifts
            let alpha_norm = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if k == 0 {
                leading = alpha_norm;
            }
            if leading == 0.0 || alpha_norm <= RANK_TOLERANCE * leading {
                return Err(Error::SingularSystem {
                    ratio: if leading == 0.0 { 0.0 } else { alpha_norm / leading },
                    tolerance: RANK_TOLERANCE,
                });
            }

            let x0 = r[(k, k)];
            let phase = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * alpha_norm;
            let mut v: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] = x0 - alpha;
            let vnorm2: f64 = v.iter().map(Complex64::norm_sqr).sum();
            apply_reflector(&mut r, k, &v, vnorm2, k);
            for j in k + 1..n {
                norms[j] -= r[(k, j)].norm_sqr();
            }
            reflectors.push((v, vnorm2));
        }
        Ok(Self { r, reflectors, perm })
    }

    pub fn cols(&self) -> usize {
        self.r.cols()
    }

    /// Minimizes `||A X - B||_F`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, n) = (self.r.rows(), self.r.cols());
        if b.rows() != m {
            return Err(Error::InvalidDimension(format!(
                "right-hand side has {} rows, expected {m}",
                b.rows()
            )));
        }
        let p = b.cols();
        let mut qb = b.clone();
        for (k, (v, vnorm2)) in self.reflectors.iter().enumerate() {
            apply_reflector(&mut qb, k, v, *vnorm2, 0);
        }
        let mut x = ComplexMatrix::zeros(n, p);
        for c in 0..p {
            for row in (0..n).rev() {
                let mut acc = qb[(row, c)];
                for j in row + 1..n {
                    acc -= self.r[(row, j)] * x[(j, c)];
                }
                x[(row, c)] = acc / self.r[(row, row)];
            }
        }
        let mut out = ComplexMatrix::zeros(n, p);
        for (row, &orig) in self.perm.iter().enumerate() {
            for c in 0..p {
                out[(orig, c)] = x[(row, c)];
            }
        }
        Ok(out)
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.solve(&ComplexMatrix::from_columns(&[b.to_vec()])?)?.column(0))
    }

    /// `tr{(A^H A)^-1}`, computed as `||R^-1||_F^2`.
    pub fn trace_inverse_gram(&self) -> f64 {
        let n = self.r.cols();
        // columns of R^-1 by back substitution against unit vectors
        let mut total = 0.0;
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            col.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for row in (0..=c).rev() {
                let mut acc = if row == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                for j in row + 1..=c {
                    acc -= self.r[(row, j)] * col[j];
                }
                col[row] = acc / self.r[(row, row)];
                total += col[row].norm_sqr();
            }
        }
        total
    }
}

/// Applies `I - 2 v v^H / |v|^2` (acting on rows `k..`) to columns `from..`.
fn apply_reflector(mat: &mut ComplexMatrix, k: usize, v: &[Complex64], vnorm2: f64, from: usize) {
    if vnorm2 == 0.0 {
        return;
    }
    let cols = mat.cols();
    let scale = 2.0 / vnorm2;
    let mut s = vec![Complex64::new(0.0, 0.0); cols - from];
    for (i, vi) in v.iter().enumerate() {
        let vc = vi.conj();
        let row = &mat.data[(k + i) * cols + from..(k + i + 1) * cols];
        for (acc, x) in s.iter_mut().zip(row) {
            *acc += vc * x;
        }
    }
    s.iter_mut().for_each(|z| *z *= scale);
    for (i, vi) in v.iter().enumerate() {
        let row = &mut mat.data[(k + i) * cols + from..(k + i + 1) * cols];
        for (x, sj) in row.iter_mut().zip(&s) {
            *x -= sj * vi;
        }
    }
}

/// Least-squares solution of `A X = B` for tall, full-column-rank `A`.
///
/// Householder QR with column pivoting; see [`LeastSquares`].
pub fn ls_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.rows() != a.rows() {
        return Err(Error::InvalidDimension(format!(
            "right-hand side has {} rows, expected {}",
            b.rows(),
            a.rows()
        )));
    }
    LeastSquares::new(a)?.solve(b)
}

/// Least-squares solution of `X A = B` for wide, full-row-rank `A`,
/// i.e. `X = B A^H (A A^H)^{-1}`.
pub fn right_ls_solve(b: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.cols() != a.cols() {
        return Err(Error::InvalidDimension(format!(
            "left-hand side has {} columns, expected {}",
            b.cols(),
            a.cols()
        )));
    }
    Ok(ls_solve(&a.adjoint(), &b.adjoint())?.adjoint())
}

/// Left pseudo-inverse `(A^H A)^{-1} A^H` of a tall full-column-rank matrix.
pub fn pseudo_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ls_solve(a, &ComplexMatrix::identity(a.rows()))
}
