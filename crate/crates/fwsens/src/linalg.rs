//! Minimal dense linear algebra for desk-scale problems.
//!
//! Everything here is deliberately small and deterministic: row-major
//! storage, Gaussian elimination with partial pivoting, and a cyclic Jacobi
//! eigenvalue sweep for symmetric matrices. Determinism matters because the
//! public solvers promise bitwise-identical outputs for identical inputs.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row vectors. Rows must be non-empty and rectangular.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidShape("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidShape(
                "matrix needs at least one column".into(),
            ));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidShape(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    cols
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    /// Borrow of row `i`.
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x` for a column vector `x`.
    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `y A` for a row vector `y` (returns a row vector of length `cols`).
    pub fn vecmat(&self, y: &[S]) -> Vec<S> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![S::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == S::zero() {
                continue;
            }
            let row = self.row(i);
            for (o, &a) in out.iter_mut().zip(row) {
                *o = *o + yi * a;
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix<S> {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `(A + A^T) / 2`; caller must pass a square matrix.
    pub fn symmetrized(&self) -> Matrix<S> {
        debug_assert_eq!(self.rows, self.cols);
        let half = cast::<S>(0.5);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in i..self.cols {
                let v = half * (self.get(i, j) + self.get(j, i));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }

    /// Largest absolute difference to `other`; shapes must match.
    pub fn max_abs_diff(&self, other: &Matrix<S>) -> S {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).abs())
            .fold(S::zero(), S::max)
    }
}

/// Inner product of two equal-length slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// `a - b` componentwise.
pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

/// `x + gamma * d` componentwise.
pub fn add_scaled<S: Scalar>(x: &[S], gamma: S, d: &[S]) -> Vec<S> {
    debug_assert_eq!(x.len(), d.len());
    x.iter().zip(d).map(|(xi, di)| *xi + gamma * *di).collect()
}

/// Squared Euclidean norm.
pub fn norm2_sq<S: Scalar>(v: &[S]) -> S {
    v.iter().map(|x| *x * *x).sum()
}

/// Largest absolute entry.
pub fn norm_inf<S: Scalar>(v: &[S]) -> S {
    v.iter().map(|x| x.abs()).fold(S::zero(), S::max)
}

/// Solves `A x = rhs` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when some pivot has magnitude at most `pivot_tol`, which
/// callers treat as "singular within tolerance".
pub fn solve<S: Scalar>(a: &Matrix<S>, rhs: &[S], pivot_tol: S) -> Option<Vec<S>> {
    let mut x = solve_once(a, rhs, pivot_tol)?;
    // One step of iterative refinement. At these sizes the extra
    // elimination is free, and it keeps residuals near round-off even when
    // the basis is poorly conditioned; exact solutions are left untouched
    // because their correction is exactly zero.
    let ax = a.matvec(&x);
    let resid: Vec<S> = rhs.iter().zip(&ax).map(|(r, v)| *r - *v).collect();
    if let Some(dx) = solve_once(a, &resid, pivot_tol) {
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi = *xi + *di;
        }
    }
    Some(x)
}

fn solve_once<S: Scalar>(a: &Matrix<S>, rhs: &[S], pivot_tol: S) -> Option<Vec<S>> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    debug_assert_eq!(rhs.len(), n);
    let w = n + 1;
    let mut aug = vec![S::zero(); n * w];
    for i in 0..n {
        aug[i * w..i * w + n].copy_from_slice(a.row(i));
        aug[i * w + n] = rhs[i];
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = aug[col * w + col].abs();
        for r in col + 1..n {
            let v = aug[r * w + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= pivot_tol {
            return None;
        }
        if piv != col {
            for j in 0..w {
                aug.swap(col * w + j, piv * w + j);
            }
        }
        let d = aug[col * w + col];
        for r in col + 1..n {
            let factor = aug[r * w + col] / d;
            if factor == S::zero() {
                continue;
            }
            for j in col..w {
                let upd = aug[r * w + j] - factor * aug[col * w + j];
                aug[r * w + j] = upd;
            }
        }
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = aug[i * w + n];
        for j in i + 1..n {
            acc = acc - aug[i * w + j] * x[j];
        }
        x[i] = acc / aug[i * w + i];
    }
    Some(x)
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi sweeps, ascending.
///
/// Converges quadratically; 30 sweeps is far beyond what desk-scale matrices
/// need, and the routine stops early once the off-diagonal mass is at the
/// round-off floor.
pub fn symmetric_eigenvalues<S: Scalar>(a: &Matrix<S>) -> Vec<S> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    if n == 1 {
        return vec![a.get(0, 0)];
    }
    let mut m = a.clone();
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).abs())
        .fold(S::zero(), S::max)
        .max(S::one());
    let stop = S::epsilon() * scale * cast(1e-2);
    for _ in 0..30 {
        let mut off = S::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(m.get(i, j).abs());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() <= stop {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (cast::<S>(2.0) * apq);
                let t = {
                    let denom = theta.abs() + (theta * theta + S::one()).sqrt();
                    if theta >= S::zero() {
                        S::one() / denom
                    } else {
                        -S::one() / denom
                    }
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
            }
        }
    }
    let mut eig: Vec<S> = (0..n).map(|i| m.get(i, i)).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    eig
}
