//! Linear minimization oracle over a polytope, with dual prices.
//!
//! `solve_lmo` minimizes `c z` over `{ z : A z <= b }` and returns both a
//! minimizing vertex `v` and a price vector `lambda >= 0` with
//! `c = -lambda A` and `c v = -lambda b`. The implementation runs a textbook
//! two-phase dense simplex with Bland's anti-cycling rule on the equivalent
//! standard-form program
//!
//! ```text
//!     min  b^T lambda   s.t.   A^T lambda = -c,   lambda >= 0,
//! ```
//!
//! whose variables are exactly the prices. The optimal basis names `n`
//! linearly independent rows of `A`; the vertex and the prices are then
//! refined by two fresh `n x n` solves against the original data, which
//! keeps the returned certificate residuals at round-off level instead of
//! accumulating tableau error.
//!
//! Everything is deterministic: identical inputs take identical pivot
//! sequences and produce bitwise-identical outputs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::linalg::{self, Matrix};
use crate::scalar::{tol, Scalar};

/// Pivot elements at or below this magnitude are treated as zero.
pub const PIVOT_TOL: f64 = 1e-11;

/// Default tolerance for accepting an optimality certificate.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// Reduced costs above `-RC_TOL` count as non-improving.
const RC_TOL: f64 = 1e-9;

/// A vertex minimizer together with its dual certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalDualPair<S> {
    /// Minimizing vertex of the polytope.
    pub vertex: Vec<S>,
    /// Prices `lambda >= 0`, one per constraint row, with `c = -lambda A`.
    pub dual_prices: Vec<S>,
    /// Optimal value `c v` (equals `-lambda b` up to round-off).
    pub value: S,
    /// The `n` linearly independent rows active at the vertex that the
    /// simplex terminated on, ascending.
    pub basis: Vec<usize>,
}

/// Residuals of the five optimality conditions, plus the verdict at the
/// tolerance the caller supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<S> {
    /// `max_j |c_j + (lambda A)_j|`
    pub stationarity: S,
    /// `max(|value - c v|, |value + lambda b|)`
    pub value_equation: S,
    /// `max_i |lambda_i (b - A v)_i|`
    pub complementary_slackness: S,
    /// `max_i (A v - b)_i^+`
    pub primal_feasibility: S,
    /// `max_i (-lambda_i)^+`
    pub dual_nonnegativity: S,
    pub valid: bool,
}

impl<S: Scalar> CertificateReport<S> {
    /// Largest of the five residuals.
    pub fn max_residual(&self) -> S {
        self.stationarity
            .max(self.value_equation)
            .max(self.complementary_slackness)
            .max(self.primal_feasibility)
            .max(self.dual_nonnegativity)
    }
}

/// Minimizes `c z` over the polytope and returns the vertex/price pair.
///
/// Errors: `Infeasible` when the polytope is empty, `Unbounded` when the
/// objective has no finite minimum or the feasible set has no vertex, and
/// `NumericalBreakdown` when a pivot falls below [`PIVOT_TOL`].
pub fn solve_lmo<S: Scalar>(p: &Polytope<S>, c: &[S]) -> Result<PrimalDualPair<S>> {
    let n = p.dim();
    let m = p.num_constraints();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            context: "objective vector vs polytope dimension",
            expected: n,
            got: c.len(),
        });
    }
    if !c.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("objective vector"));
    }

    // Standard-form data: columns of A^T are the rows of A.
    let a_t = p.a().transpose();
    let q: Vec<S> = c.iter().map(|v| -*v).collect();

    let basis = match two_phase(&a_t, &q, p.b(), true)? {
        SimplexOutcome::Optimal(basis) => basis,
        SimplexOutcome::NoVertex => return Err(Error::Unbounded),
        SimplexOutcome::Unbounded => return Err(Error::Infeasible),
        SimplexOutcome::DualInfeasible => {
            // The prices have no feasible assignment: the original program is
            // empty or unbounded. Farkas probe: minimize b^T mu over
            // { A^T mu = 0, mu >= 0 }; that cone program is unbounded exactly
            // when no point satisfies A z <= b.
            let zero = vec![S::zero(); n];
            return match two_phase(&a_t, &zero, p.b(), false)? {
                SimplexOutcome::Unbounded => Err(Error::Infeasible),
                _ => Err(Error::Unbounded),
            };
        }
    };

    // Refine vertex and prices against the original data. The basis rows are
    // linearly independent by the simplex invariant.
    let a_b = p.a().select_rows(&basis);
    let b_b: Vec<S> = basis.iter().map(|&i| p.b()[i]).collect();
    let pivot_tol = tol::<S>(PIVOT_TOL);
    let vertex = linalg::solve(&a_b, &b_b, pivot_tol)
        .ok_or(Error::NumericalBreakdown("basis system became singular"))?;
    let lambda_b = linalg::solve(&a_b.transpose(), &q, pivot_tol)
        .ok_or(Error::NumericalBreakdown("price system became singular"))?;

    let clamp = tol::<S>(RC_TOL);
    let mut dual_prices = vec![S::zero(); m];
    for (slot, &row) in basis.iter().enumerate() {
        let price = lambda_b[slot];
        if price < -clamp {
            return Err(Error::NumericalBreakdown(
                "refined dual price is significantly negative",
            ));
        }
        dual_prices[row] = price.max(S::zero());
    }

    let value = linalg::dot(c, &vertex);
    Ok(PrimalDualPair {
        vertex,
        dual_prices,
        value,
        basis,
    })
}

/// Evaluates the five optimality residuals of a pair at tolerance `tol`.
pub fn verify_certificate<S: Scalar>(
    p: &Polytope<S>,
    c: &[S],
    pair: &PrimalDualPair<S>,
    tol: S,
) -> Result<CertificateReport<S>> {
    let n = p.dim();
    let m = p.num_constraints();
    for (len, context) in [
        (c.len(), "objective vector vs polytope dimension"),
        (pair.vertex.len(), "vertex vs polytope dimension"),
    ] {
        if len != n {
            return Err(Error::DimensionMismatch {
                context,
                expected: n,
                got: len,
            });
        }
    }
    if pair.dual_prices.len() != m {
        return Err(Error::DimensionMismatch {
            context: "dual prices vs constraint rows",
            expected: m,
            got: pair.dual_prices.len(),
        });
    }

    let lambda_a = p.a().vecmat(&pair.dual_prices);
    let stationarity = c
        .iter()
        .zip(&lambda_a)
        .map(|(cj, lj)| (*cj + *lj).abs())
        .fold(S::zero(), S::max);

    let cv = linalg::dot(c, &pair.vertex);
    let lb = linalg::dot(&pair.dual_prices, p.b());
    let value_equation = (pair.value - cv).abs().max((pair.value + lb).abs());

    let av = p.a().matvec(&pair.vertex);
    let mut complementary_slackness = S::zero();
    let mut primal_feasibility = S::zero();
    let mut dual_nonnegativity = S::zero();
    for (i, &avi) in av.iter().enumerate() {
        let slack = p.b()[i] - avi;
        complementary_slackness = complementary_slackness.max((pair.dual_prices[i] * slack).abs());
        primal_feasibility = primal_feasibility.max(-slack).max(S::zero());
        dual_nonnegativity = dual_nonnegativity.max(-pair.dual_prices[i]).max(S::zero());
    }

    let report = CertificateReport {
        stationarity,
        value_equation,
        complementary_slackness,
        primal_feasibility,
        dual_nonnegativity,
        valid: false,
    };
    let valid = report.max_residual() <= tol;
    Ok(CertificateReport { valid, ..report })
}

/// Complementarity gap `lambda (b - A x)` of a price vector at a point.
pub fn complementarity_gap<S: Scalar>(
    p: &Polytope<S>,
    x: &[S],
    pair: &PrimalDualPair<S>,
) -> Result<S> {
    if pair.dual_prices.len() != p.num_constraints() {
        return Err(Error::DimensionMismatch {
            context: "dual prices vs constraint rows",
            expected: p.num_constraints(),
            got: pair.dual_prices.len(),
        });
    }
    let slack = p.slack(x)?;
    Ok(linalg::dot(&pair.dual_prices, &slack))
}

enum SimplexOutcome {
    /// Optimal basis, ascending row indices, all structural.
    Optimal(Vec<usize>),
    /// Phase 1 could not zero the artificials.
    DualInfeasible,
    /// Phase 2 found a descent ray.
    Unbounded,
    /// An artificial variable is stuck in the basis: the constraint matrix
    /// is rank-deficient, so the feasible set has no vertex.
    NoVertex,
}

/// Two-phase primal simplex for `min w y` s.t. `mat y = q`, `y >= 0`.
///
/// `mat` is `n x m`; artificial columns are indexed `m..m+n` and are never
/// allowed to (re-)enter. Bland's rule everywhere: the entering column is
/// the lowest eligible index and ratio-test ties go to the row whose basic
/// variable has the lowest index, which guarantees termination.
fn two_phase<S: Scalar>(
    mat: &Matrix<S>,
    q: &[S],
    w: &[S],
    require_vertex: bool,
) -> Result<SimplexOutcome> {
    let n = mat.rows();
    let m = mat.cols();
    let width = m + n + 1;
    let rhs = m + n;
    let pivot_tol = tol::<S>(PIVOT_TOL);

    // Rows are sign-flipped so the right-hand side starts non-negative.
    let mut body = vec![S::zero(); n * width];
    for i in 0..n {
        let flip = q[i] < S::zero();
        for j in 0..m {
            let v = mat.get(i, j);
            body[i * width + j] = if flip { -v } else { v };
        }
        body[i * width + m + i] = S::one();
        body[i * width + rhs] = if flip { -q[i] } else { q[i] };
    }
    let mut basis: Vec<usize> = (m..m + n).collect();

    // Phase-1 reduced costs for unit costs on the artificials.
    let mut cost = vec![S::zero(); width];
    for j in (0..m).chain([rhs]) {
        let col_sum: S = (0..n).map(|i| body[i * width + j]).sum();
        cost[j] = -col_sum;
    }

    let max_pivots = 200 * (m + n) + 5_000;
    if run_phase(&mut body, &mut cost, &mut basis, n, m, width, max_pivots)?.is_some() {
        // The phase-1 objective is bounded below by zero; a descent ray here
        // can only come from broken arithmetic.
        return Err(Error::NumericalBreakdown("phase 1 reported a descent ray"));
    }
    let phase1_obj = -cost[rhs];
    let q_scale: S = q.iter().map(|v| v.abs()).sum();
    if phase1_obj > tol::<S>(1e-7) * (S::one() + q_scale) {
        return Ok(SimplexOutcome::DualInfeasible);
    }

    // Drive leftover artificials out of the basis through degenerate pivots.
    for row in 0..n {
        if basis[row] < m {
            continue;
        }
        let enter = (0..m).find(|&j| body[row * width + j].abs() > pivot_tol);
        match enter {
            Some(j) => pivot(&mut body, &mut cost, &mut basis, n, width, row, j),
            None if require_vertex => return Ok(SimplexOutcome::NoVertex),
            None => {}
        }
    }

    // Phase-2 reduced costs from the real objective (artificials cost zero).
    let w_of = |var: usize| if var < m { w[var] } else { S::zero() };
    for j in 0..width {
        if j == rhs || j < m {
            let direct = if j < m { w[j] } else { S::zero() };
            let synth: S = (0..n)
                .map(|i| w_of(basis[i]) * body[i * width + j])
                .sum();
            cost[j] = direct - synth;
        } else {
            cost[j] = S::zero();
        }
    }
    cost[rhs] = -(0..n)
        .map(|i| w_of(basis[i]) * body[i * width + rhs])
        .sum::<S>();

    if run_phase(&mut body, &mut cost, &mut basis, n, m, width, max_pivots)?.is_some() {
        return Ok(SimplexOutcome::Unbounded);
    }

    let mut rows: Vec<usize> = basis.clone();
    rows.sort_unstable();
    if rows.iter().any(|&v| v >= m) {
        if require_vertex {
            return Ok(SimplexOutcome::NoVertex);
        }
        rows.retain(|&v| v < m);
    }
    Ok(SimplexOutcome::Optimal(rows))
}

/// Runs Bland pivots until optimal (`Ok(None)`) or an unbounded entering
/// column is found (`Ok(Some(column))`).
fn run_phase<S: Scalar>(
    body: &mut [S],
    cost: &mut [S],
    basis: &mut [usize],
    n: usize,
    m: usize,
    width: usize,
    max_pivots: usize,
) -> Result<Option<usize>> {
    let pivot_tol = tol::<S>(PIVOT_TOL);
    let rc_tol = tol::<S>(RC_TOL);
    for _ in 0..max_pivots {
        // Bland: lowest structural index with an improving reduced cost.
        let Some(enter) = (0..m).find(|&j| cost[j] < -rc_tol) else {
            return Ok(None);
        };
        let mut leave: Option<(usize, S)> = None;
        for i in 0..n {
            let coef = body[i * width + enter];
            if coef <= pivot_tol {
                continue;
            }
            let rhs_val = body[i * width + width - 1].max(S::zero());
            let ratio = rhs_val / coef;
            leave = match leave {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br || (ratio == br && basis[i] < basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            return Ok(Some(enter));
        };
        pivot(body, cost, basis, n, width, row, enter);
    }
    Err(Error::NumericalBreakdown(
        "pivot budget exhausted without convergence",
    ))
}

fn pivot<S: Scalar>(
    body: &mut [S],
    cost: &mut [S],
    basis: &mut [usize],
    n: usize,
    width: usize,
    row: usize,
    col: usize,
) {
    let d = body[row * width + col];
    for j in 0..width {
        body[row * width + j] = body[row * width + j] / d;
    }
    body[row * width + col] = S::one();
    for i in 0..n {
        if i == row {
            continue;
        }
        let factor = body[i * width + col];
        if factor == S::zero() {
            continue;
        }
        for j in 0..width {
            let upd = body[i * width + j] - factor * body[row * width + j];
            body[i * width + j] = upd;
        }
        body[i * width + col] = S::zero();
    }
    let factor = cost[col];
    if factor != S::zero() {
        for j in 0..width {
            cost[j] = cost[j] - factor * body[row * width + j];
        }
        cost[col] = S::zero();
    }
    basis[row] = col;
}
