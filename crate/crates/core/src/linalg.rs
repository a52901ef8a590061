//! Dense row-major matrices and a real unsymmetric eigensolver.
//!
//! Eigenvalues are computed by Householder reduction to upper-Hessenberg form
//! followed by Francis double-shift QR iteration. Complex conjugate pairs are
//! extracted from trailing 2×2 blocks, so no complex arithmetic is needed.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative threshold below which a subdiagonal entry is treated as zero.
pub const DEFLATION_TOL: f64 = 1e-14;
/// QR sweeps allowed per eigenvalue before giving up.
pub const ITERATIONS_PER_EIGENVALUE: usize = 40;
/// Absolute tolerance used when pairing complex conjugates.
pub const PAIRING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("expected {expected} entries for the given shape, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("QR iteration did not converge after {iterations} sweeps; {remaining} eigenvalues left undeflated")]
    NoConvergence { iterations: usize, remaining: usize },
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: pos / cols,
                col: pos % cols,
                value: data[pos],
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::LengthMismatch {
                    expected: c,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(r, c, data)
    }

    /// Panics on an empty shape; intended for internally sized buffers.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
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
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::ShapeMismatch {
                op: "matvec",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn scale(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn trace(&self) -> Result<f64, LinalgError> {
        self.require_square("trace")?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn determinant(&self) -> Result<f64, LinalgError> {
        self.require_square("determinant")?;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap_or(k);
            if a[pivot * n + k] == 0.0 {
                return Ok(0.0);
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            let akk = a[k * n + k];
            det *= akk;
            for i in k + 1..n {
                let f = a[i * n + k] / akk;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum (the induced infinity norm).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> Option<f64> {
        (self.shape() == other.shape()).then(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn is_upper_hessenberg(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i.saturating_sub(1)).all(|j| self[(i, j)] == 0.0))
    }

    fn require_square(&self, op: &'static str) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for v in self.row(i).iter().take(8) {
                write!(f, "{v:>12.5e} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    a.matmul(b)
}

pub fn scale(a: &Matrix, alpha: f64) -> Matrix {
    a.scale(alpha)
}

/// Eigenvalue multiset of a real square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.values.iter().product()
    }

    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.norm())
    }

    pub fn squared_moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.norm_sqr())
    }

    pub fn scaled(&self, alpha: f64) -> Spectrum {
        Spectrum::new(self.values.iter().map(|v| v * alpha).collect())
    }

    pub fn conjugated(&self) -> Spectrum {
        Spectrum::new(self.values.iter().map(|v| v.conj()).collect())
    }

    /// The `count` values of largest modulus, in descending modulus order.
    pub fn largest(&self, count: usize) -> Spectrum {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        v.truncate(count);
        Spectrum::new(v)
    }

    /// True when every value with a nonzero imaginary part has a conjugate
    /// partner within `tol` on both components.
    pub fn has_conjugate_closure(&self, tol: f64) -> bool {
        let mut used = vec![false; self.values.len()];
        for (i, v) in self.values.iter().enumerate() {
            if v.im.abs() <= tol || used[i] {
                continue;
            }
            let partner = self.values.iter().enumerate().position(|(j, w)| {
                j != i
                    && !used[j]
                    && (w.re - v.re).abs() <= tol
                    && (w.im + v.im).abs() <= tol
            });
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }

    /// Greedy multiset distance: repeatedly pairs the closest remaining
    /// values and returns the largest pair distance. `None` if the lengths
    /// differ.
    pub fn matching_error(&self, other: &Spectrum) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(self.len() * other.len());
        for (i, a) in self.values.iter().enumerate() {
            for (j, b) in other.values.iter().enumerate() {
                pairs.push(((a - b).norm(), i, j));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut left = vec![false; self.len()];
        let mut right = vec![false; other.len()];
        let mut worst = 0.0f64;
        let mut matched = 0;
        for (d, i, j) in pairs {
            if left[i] || right[j] {
                continue;
            }
            left[i] = true;
            right[j] = true;
            worst = worst.max(d);
            matched += 1;
            if matched == self.len() {
                break;
            }
        }
        Some(worst)
    }
}

/// Orthogonal reduction to upper-Hessenberg form by Householder reflections.
/// Entries below the first subdiagonal are exactly zero in the result.
pub fn hessenberg(a: &Matrix) -> Result<Matrix, LinalgError> {
    a.require_square("hessenberg")?;
    let n = a.rows;
    let mut h = a.clone();
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let scale: f64 = (k + 1..n).map(|i| h[(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            v[i] = h[(i, k)] / scale;
            norm_sq += v[i] * v[i];
        }
        let alpha = if v[k + 1] > 0.0 {
            -norm_sq.sqrt()
        } else {
            norm_sq.sqrt()
        };
        let beta = norm_sq - v[k + 1] * alpha;
        if beta == 0.0 {
            continue;
        }
        v[k + 1] -= alpha;
        // H <- P H, P = I - v vᵀ / beta
        for j in k..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * h[(i, j)]).sum::<f64>() / beta;
            for i in k + 1..n {
                h[(i, j)] -= s * v[i];
            }
        }
        // H <- H P
        for i in 0..n {
            let s: f64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum::<f64>() / beta;
            for j in k + 1..n {
                h[(i, j)] -= s * v[j];
            }
        }
        h[(k + 1, k)] = alpha * scale;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    Ok(h)
}

/// All eigenvalues of a real square matrix, with multiplicity.
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum, LinalgError> {
    a.require_square("eigenvalues")?;
    let mut h = hessenberg(a)?;
    hessenberg_qr(&mut h)
}

/// Francis double-shift QR on an upper-Hessenberg matrix, which is
/// overwritten. Only the active window is updated, so the final contents
/// are not a Schur form.
fn hessenberg_qr(h: &mut Matrix) -> Result<Spectrum, LinalgError> {
    let nn = h.rows;
    let mut re = vec![0.0; nn];
    let mut im = vec![0.0; nn];

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let cap = ITERATIONS_PER_EIGENVALUE * nn;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut shift_acc = 0.0;
    // `hi` is the last row of the active block, stored offset by one so the
    // loop can run down to an empty block.
    let mut hi = nn;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);

    while hi > 0 {
        let n = hi - 1;
        // locate a negligible subdiagonal entry
        let mut l = n;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= DEFLATION_TOL * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == n {
            re[n] = h[(n, n)] + shift_acc;
            im[n] = 0.0;
            hi -= 1;
            its = 0;
        } else if l + 1 == n {
            w = h[(n, n - 1)] * h[(n - 1, n)];
            p = 0.5 * (h[(n - 1, n - 1)] - h[(n, n)]);
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[(n, n)] + shift_acc;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                re[n - 1] = x + z;
                re[n] = if z != 0.0 { x - w / z } else { x + z };
                im[n - 1] = 0.0;
                im[n] = 0.0;
            } else {
                re[n - 1] = x + p;
                re[n] = x + p;
                im[n - 1] = z;
                im[n] = -z;
            }
            hi -= 2;
            its = 0;
        } else {
            if total >= cap {
                return Err(LinalgError::NoConvergence {
                    iterations: total,
                    remaining: hi,
                });
            }
            x = h[(n, n)];
            y = h[(n - 1, n - 1)];
            w = h[(n, n - 1)] * h[(n - 1, n)];
            if its == 10 || its == 20 {
                // exceptional shift
                shift_acc += x;
                for i in 0..=n {
                    h[(i, i)] -= x;
                }
                s = h[(n, n - 1)].abs() + h[(n - 1, n - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            // look for two consecutive small subdiagonal entries
            let mut m = n - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=n {
                h[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // double-shift sweep over rows/columns l..=n
            for k in m..n {
                let not_last = k + 1 != n;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if not_last { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                } else {
                    x = 0.0;
                }
                s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[(k, k - 1)] = -s * x;
                } else if l != m {
                    h[(k, k - 1)] = -h[(k, k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for j in k..=n {
                    let mut t = h[(k, j)] + q * h[(k + 1, j)];
                    if not_last {
                        t += r * h[(k + 2, j)];
                        h[(k + 2, j)] -= t * z;
                    }
                    h[(k + 1, j)] -= t * y;
                    h[(k, j)] -= t * x;
                }
                let top = n.min(k + 3);
                for i in l..=top {
                    let mut t = x * h[(i, k)] + y * h[(i, k + 1)];
                    if not_last {
                        t += z * h[(i, k + 2)];
                        h[(i, k + 2)] -= t * r;
                    }
                    h[(i, k + 1)] -= t * q;
                    h[(i, k)] -= t;
                }
            }
        }
    }

    Ok(Spectrum::new(
        re.into_iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(a, b))
            .collect(),
    ))
}
