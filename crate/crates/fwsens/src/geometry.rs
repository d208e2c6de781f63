//! Polytopes in inequality form `{ z : A z <= b }` and the exact-arithmetic
//! style predicates the solvers rely on: membership, active/strict row
//! splits, boundedness certification and (for small instances) exhaustive
//! vertex enumeration.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::lp_oracle;
use crate::scalar::{tol, Scalar};

/// Default absolute feasibility tolerance. Every membership predicate takes
/// the tolerance explicitly; this is the value the rest of the crate passes
/// when the caller has no reason to override it.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Vertex enumeration guard: dimension must not exceed this.
pub const MAX_ENUM_DIM: usize = 8;
/// Vertex enumeration guard: row count must not exceed this.
pub const MAX_ENUM_ROWS: usize = 16;

/// Euclidean distance below which two enumerated vertices are considered equal.
const VERTEX_DEDUP_TOL: f64 = 1e-9;

/// Pivot threshold below which an `n x n` row subsystem counts as singular.
const SUBSYSTEM_PIVOT_TOL: f64 = 1e-11;

/// Bounded polyhedron `{ z in R^n : A z <= b }` with dense row-major `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<S> {
    a: Matrix<S>,
    b: Vec<S>,
}

/// Partition of constraint rows at a feasible point into rows satisfied with
/// equality (within tolerance) and rows satisfied strictly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSplit {
    pub equal_rows: Vec<usize>,
    pub strict_rows: Vec<usize>,
}

impl<S: Scalar> Polytope<S> {
    /// Builds a polytope from its constraint matrix and right-hand side.
    pub fn new(a: Matrix<S>, b: Vec<S>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                context: "right-hand side length vs constraint rows",
                expected: a.rows(),
                got: b.len(),
            });
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("constraint matrix"));
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("right-hand side"));
        }
        Ok(Polytope { a, b })
    }

    /// Convenience constructor from row vectors.
    pub fn from_rows(rows: Vec<Vec<S>>, b: Vec<S>) -> Result<Self> {
        Polytope::new(Matrix::from_rows(rows)?, b)
    }

    /// Number of constraint rows `m`.
    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// Row `i` of the constraint matrix.
    pub fn row(&self, i: usize) -> &[S] {
        self.a.row(i)
    }

    fn check_point_dim(&self, x: &[S], context: &'static str) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Slack vector `b - A x`.
    pub fn slack(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_point_dim(x, "point vs polytope dimension")?;
        let ax = self.a.matvec(x);
        Ok(linalg::sub(&self.b, &ax))
    }

    /// True iff `A x <= b + tol` componentwise (absolute tolerance).
    pub fn contains(&self, x: &[S], tol: S) -> Result<bool> {
        Ok(self.worst_violation(x)?.1 <= tol)
    }

    /// Index and size of the largest constraint violation `(A x - b)_i`.
    /// Negative violation means the point is strictly inside that row.
    pub fn worst_violation(&self, x: &[S]) -> Result<(usize, S)> {
        let slack = self.slack(x)?;
        let mut row = 0;
        let mut worst = -slack[0];
        for (i, s) in slack.iter().enumerate().skip(1) {
            if -*s > worst {
                worst = -*s;
                row = i;
            }
        }
        Ok((row, worst))
    }

    /// Splits rows into active (`|a_i x - b_i| <= tol`) and strict ones.
    ///
    /// The point must satisfy `contains(x, tol)`; infeasible points are a
    /// caller bug and rejected loudly.
    pub fn active_split(&self, x: &[S], tol: S) -> Result<ActiveSplit> {
        let slack = self.slack(x)?;
        let mut equal_rows = Vec::new();
        let mut strict_rows = Vec::new();
        for (i, s) in slack.iter().enumerate() {
            if *s < -tol {
                return Err(Error::InfeasiblePoint {
                    row: i,
                    violation: (-*s).to_f64().unwrap_or(f64::NAN),
                });
            }
            if s.abs() <= tol {
                equal_rows.push(i);
            } else {
                strict_rows.push(i);
            }
        }
        Ok(ActiveSplit {
            equal_rows,
            strict_rows,
        })
    }

    /// Certifies boundedness by minimizing and maximizing every coordinate
    /// functional over the polytope (`2n` LP solves).
    ///
    /// Returns `Ok(true)` iff all those values are finite, `Ok(false)` when
    /// some direction is unbounded, and `Err(Infeasible)` for an empty
    /// polytope, which is reported distinctly on purpose.
    pub fn assert_bounded(&self) -> Result<bool> {
        let n = self.dim();
        let mut c = vec![S::zero(); n];
        for i in 0..n {
            for sign in [S::one(), -S::one()] {
                c[i] = sign;
                match lp_oracle::solve_lmo(self, &c) {
                    Ok(_) => {}
                    Err(Error::Unbounded) => return Ok(false),
                    Err(e) => return Err(e),
                }
            }
            c[i] = S::zero();
        }
        Ok(true)
    }

    /// Same polytope geometry with a replacement right-hand side.
    ///
    /// The constraint matrix is shared verbatim and `b_new` is stored
    /// bitwise, so perturbing back to the original `b` is an exact round
    /// trip.
    pub fn perturb_rhs(&self, b_new: &[S]) -> Result<Polytope<S>> {
        if b_new.len() != self.num_constraints() {
            return Err(Error::DimensionMismatch {
                context: "perturbed right-hand side length",
                expected: self.num_constraints(),
                got: b_new.len(),
            });
        }
        if !b_new.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("perturbed right-hand side"));
        }
        Ok(Polytope {
            a: self.a.clone(),
            b: b_new.to_vec(),
        })
    }

    /// All vertices of the polytope, obtained by solving every `n x n` row
    /// subsystem and keeping the feasible, deduplicated solutions.
    ///
    /// Exhaustive over row subsets, so the instance must satisfy
    /// [`MAX_ENUM_DIM`] and [`MAX_ENUM_ROWS`]. Singular subsystems are
    /// skipped silently; the enumeration order (lexicographic in the row
    /// subsets) is deterministic.
    pub fn enumerate_vertices(&self) -> Result<Vec<Vec<S>>> {
        let n = self.dim();
        let m = self.num_constraints();
        if n > MAX_ENUM_DIM || m > MAX_ENUM_ROWS {
            return Err(Error::SizeGuard {
                dim: n,
                rows: m,
                max_dim: MAX_ENUM_DIM,
                max_rows: MAX_ENUM_ROWS,
            });
        }
        if m < n {
            // Fewer rows than dimensions cannot pin a vertex.
            return Ok(Vec::new());
        }
        let pivot_tol = tol::<S>(SUBSYSTEM_PIVOT_TOL);
        let feas_tol = tol::<S>(DEFAULT_FEASIBILITY_TOL);
        let dedup = tol::<S>(VERTEX_DEDUP_TOL);
        let dedup_sq = dedup * dedup;
        let mut vertices: Vec<Vec<S>> = Vec::new();
        for subset in subsets_lexicographic(m, n) {
            let a_s = self.a.select_rows(&subset);
            let b_s: Vec<S> = subset.iter().map(|&i| self.b[i]).collect();
            let Some(candidate) = linalg::solve(&a_s, &b_s, pivot_tol) else {
                continue;
            };
            if !self.contains(&candidate, feas_tol)? {
                continue;
            }
            let duplicate = vertices
                .iter()
                .any(|v| linalg::norm2_sq(&linalg::sub(v, &candidate)) <= dedup_sq);
            if !duplicate {
                vertices.push(candidate);
            }
        }
        Ok(vertices)
    }
}

/// All `k`-element subsets of `0..m` in lexicographic order.
fn subsets_lexicographic(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + m - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}
