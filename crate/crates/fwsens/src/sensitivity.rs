//! Sensitivity of the optimal value under right-hand-side perturbations.
//!
//! Given a feasible point `x`, the oracle pair `(v, lambda)` for the
//! gradient at `x`, and a perturbed feasible set `P' = { z : A z <= b' }`,
//! the report sandwiches both optimal values without re-solving anything:
//!
//! ```text
//!   f(x) - gap                        <=  min_P  f  <=  f(x)
//!   f(x) - gap + grad f(x) (v' - v)   <=  min_P' f  <=  f(x') upper via smoothness
//!   f(x) - gap + lambda (b - b')      <=  min_P' f  <=  same, price form
//! ```
//!
//! where `x' = x - v + v'` translates the iterate into `P'`. The price form
//! is only valid when `lambda` certifies `v'` in `P'` too (`common_dual`),
//! and the upper bounds require `x'` to be feasible; the report carries both
//! flags and omits exactly the bounds whose hypotheses failed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fw;
use crate::geometry::{Polytope, MAX_ENUM_DIM, MAX_ENUM_ROWS};
use crate::linalg;
use crate::lp_oracle::{self, PrimalDualPair};
use crate::objective::{QuadraticObjective, SmoothObjective};
use crate::reference;
use crate::scalar::{cast, Scalar};

/// Closed interval; both ends always present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<S> {
    pub lower: S,
    pub upper: S,
}

/// Lower bound with an upper bound that may be unavailable (its hypothesis
/// failed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueBounds<S> {
    pub lower: S,
    pub upper: Option<S>,
}

/// Feasibility of the translated iterate, with offending rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationCheck {
    pub feasible: bool,
    pub violated_rows: Vec<usize>,
}

/// Everything the analysis derived at one `(x, b')` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport<S> {
    /// Analysis point.
    pub x: Vec<S>,
    /// Gap `grad f(x) (x - v)` in the original polytope.
    pub gap: S,
    /// Oracle vertex in `P`.
    pub v: Vec<S>,
    /// Prices certifying `v` in `P`.
    pub lambda: Vec<S>,
    /// Oracle vertex in `P'` for the same gradient.
    pub v_prime: Vec<S>,
    /// Prices certifying `v_prime` in `P'`.
    pub lambda_prime: Vec<S>,
    /// Whether `lambda` also certifies `v_prime` in `P'`.
    pub common_dual: bool,
    /// Translated iterate `x - v + v_prime`.
    pub x_prime: Vec<S>,
    /// Whether the translated iterate lies in `P'`.
    pub x_prime_feasible: bool,
    /// Rows of `P'` the translated iterate violates.
    pub violated_rows: Vec<usize>,
    /// Whether every row active at `x` is also active at `v`.
    pub minimal_face_ok: bool,
    /// Sandwich for `min_P f`.
    pub eq1: Interval<S>,
    /// Sandwich for `min_P' f` in gradient form; upper bound present only
    /// when the translated iterate is feasible.
    pub eq2: ValueBounds<S>,
    /// Sandwich for `min_P' f` in price form; present only under a common
    /// dual, upper bound additionally requires the translated iterate.
    pub eq3: Option<ValueBounds<S>>,
    /// First-order value change `lambda (b - b')` predicted by the prices.
    pub predicted_change: S,
    /// The same first-order change in gradient form, `grad f(x) (v' - v)`.
    pub directional_change: S,
    /// `(L / 2) ||v' - v||^2`: the smoothness penalty in the upper bounds.
    pub curvature_term: S,
}

/// Runs the full analysis at `x` for the perturbed right-hand side.
///
/// `x` must lie in `P` within `tol`. Errors from the perturbed oracle call
/// (empty `P'`, breakdown) surface unchanged.
pub fn analyze<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    b_prime: &[S],
    x: &[S],
    tol: S,
) -> Result<SensitivityReport<S>> {
    let (row, violation) = p.worst_violation(x)?;
    if violation > tol {
        return Err(Error::InfeasiblePoint {
            row,
            violation: violation.to_f64().unwrap_or(f64::NAN),
        });
    }

    let g = f.grad(x);
    let pair = lp_oracle::solve_lmo(p, &g)?;
    let gap = linalg::dot(&g, &linalg::sub(x, &pair.vertex));

    let p_prime = p.perturb_rhs(b_prime)?;
    let pair_prime = lp_oracle::solve_lmo(&p_prime, &g)?;

    let common_dual = check_common_dual(&pair, &p_prime, &pair_prime.vertex, tol)?;
    let translation = check_translation(x, &pair.vertex, &pair_prime.vertex, &p_prime, tol)?;
    let minimal_face_ok = minimal_face_check(p, x, &pair.vertex, tol)?;

    let x_prime: Vec<S> = x
        .iter()
        .zip(&pair.vertex)
        .zip(&pair_prime.vertex)
        .map(|((xi, vi), vpi)| *xi - *vi + *vpi)
        .collect();

    let f_x = f.eval(x);
    let shift = linalg::sub(&pair_prime.vertex, &pair.vertex);
    let directional_change = linalg::dot(&g, &shift);
    let curvature_term = cast::<S>(0.5) * f.smoothness() * linalg::norm2_sq(&shift);
    let predicted_change = linalg::dot(&pair.dual_prices, &linalg::sub(p.b(), b_prime));

    let eq1 = Interval {
        lower: f_x - gap,
        upper: f_x,
    };
    let eq2 = ValueBounds {
        lower: f_x - gap + directional_change,
        upper: translation
            .feasible
            .then(|| f_x + directional_change + curvature_term),
    };
    let eq3 = common_dual.then(|| ValueBounds {
        lower: f_x - gap + predicted_change,
        upper: translation
            .feasible
            .then(|| f_x + predicted_change + curvature_term),
    });

    Ok(SensitivityReport {
        x: x.to_vec(),
        gap,
        v: pair.vertex.clone(),
        lambda: pair.dual_prices.clone(),
        v_prime: pair_prime.vertex.clone(),
        lambda_prime: pair_prime.dual_prices.clone(),
        common_dual,
        x_prime,
        x_prime_feasible: translation.feasible,
        violated_rows: translation.violated_rows,
        minimal_face_ok,
        eq1,
        eq2,
        eq3,
        predicted_change,
        directional_change,
        curvature_term,
    })
}

/// Checks whether the translated iterate `x - v + v'` lies in `P'` and
/// lists the violated rows for diagnostics.
pub fn check_translation<S: Scalar>(
    x: &[S],
    v: &[S],
    v_prime: &[S],
    p_prime: &Polytope<S>,
    tol: S,
) -> Result<TranslationCheck> {
    let n = p_prime.dim();
    for (len, context) in [
        (x.len(), "analysis point vs polytope dimension"),
        (v.len(), "vertex vs polytope dimension"),
        (v_prime.len(), "perturbed vertex vs polytope dimension"),
    ] {
        if len != n {
            return Err(Error::DimensionMismatch {
                context,
                expected: n,
                got: len,
            });
        }
    }
    let x_prime: Vec<S> = x
        .iter()
        .zip(v)
        .zip(v_prime)
        .map(|((xi, vi), vpi)| *xi - *vi + *vpi)
        .collect();
    let slack = p_prime.slack(&x_prime)?;
    let violated_rows: Vec<usize> = slack
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < -tol)
        .map(|(i, _)| i)
        .collect();
    Ok(TranslationCheck {
        feasible: violated_rows.is_empty(),
        violated_rows,
    })
}

/// Whether the prices of `pair` also certify `v_prime` as a gradient
/// minimizer over `P'`.
///
/// Stationarity and nonnegativity do not involve the right-hand side, so
/// the check reduces to feasibility of `v_prime` and complementary
/// slackness of the prices against the new slacks.
pub fn check_common_dual<S: Scalar>(
    pair: &PrimalDualPair<S>,
    p_prime: &Polytope<S>,
    v_prime: &[S],
    tol: S,
) -> Result<bool> {
    if pair.dual_prices.len() != p_prime.num_constraints() {
        return Err(Error::DimensionMismatch {
            context: "dual prices vs constraint rows",
            expected: p_prime.num_constraints(),
            got: pair.dual_prices.len(),
        });
    }
    let slack = p_prime.slack(v_prime)?;
    for (lam, s) in pair.dual_prices.iter().zip(&slack) {
        if *s < -tol {
            return Ok(false);
        }
        if (*lam * *s).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every row active at `x` is also active at `v` (containment of
/// `x`'s minimal face in the oracle vertex's face set).
pub fn minimal_face_check<S: Scalar>(
    p: &Polytope<S>,
    x: &[S],
    v: &[S],
    tol: S,
) -> Result<bool> {
    let split = p.active_split(x, tol)?;
    let slack_v = p.slack(v)?;
    Ok(split
        .equal_rows
        .iter()
        .all(|&i| slack_v[i].abs() <= tol))
}

/// Certifies optimality of `x` by the gap test `gap <= tol`.
pub fn certify_optimality<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    x: &[S],
    tol: S,
) -> Result<(bool, PrimalDualPair<S>)> {
    let (gap, pair) = fw::fw_gap(f, p, x)?;
    Ok((gap <= tol, pair))
}

/// Halves a single-row perturbation until both report flags hold.
///
/// Returns the surviving `(delta, report)`, or `None` once `|delta|` drops
/// below `min_abs_delta` without the flags ever holding. An empty perturbed
/// polytope counts as a failed trial, not an error.
pub fn shrink_delta_until_flags<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    x: &[S],
    row: usize,
    delta0: S,
    tol: S,
    min_abs_delta: S,
) -> Result<Option<(S, SensitivityReport<S>)>> {
    if row >= p.num_constraints() {
        return Err(Error::DimensionMismatch {
            context: "perturbed row index vs constraint rows",
            expected: p.num_constraints(),
            got: row,
        });
    }
    let mut delta = delta0;
    let half = cast::<S>(0.5);
    while delta.abs() >= min_abs_delta {
        let mut b_prime = p.b().to_vec();
        b_prime[row] = b_prime[row] + delta;
        match analyze(f, p, &b_prime, x, tol) {
            Ok(report) if report.common_dual && report.x_prime_feasible => {
                return Ok(Some((delta, report)));
            }
            Ok(_) | Err(Error::Infeasible) => {}
            Err(e) => return Err(e),
        }
        delta = delta * half;
    }
    Ok(None)
}

/// One row of a single-row perturbation sweep, shaped like the CSV the CLI
/// emits: optional cells are absent exactly when their hypothesis failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint<S> {
    pub delta: S,
    /// Gap at `x` in the unperturbed polytope (constant over the sweep).
    pub gap: S,
    /// Price of the swept row in the unperturbed polytope.
    pub lambda_row: S,
    /// `-delta * lambda_row`.
    pub predicted_change: S,
    pub eq3_lower: Option<S>,
    pub eq3_upper: Option<S>,
    /// Exact optimal value over the perturbed polytope, when the instance is
    /// small enough for the enumeration oracle and `P'` is nonempty.
    pub exact_f_star: Option<S>,
    pub common_dual: bool,
    pub x_prime_feasible: bool,
}

/// Uniform grid of `steps >= 2` deltas from `min` to `max` inclusive.
pub fn delta_grid<S: Scalar>(min: S, max: S, steps: usize) -> Result<Vec<S>> {
    if steps < 2 {
        return Err(Error::InvalidConfig("sweep needs at least 2 steps"));
    }
    let span = max - min;
    let denom = S::from_usize(steps - 1).expect("step count fits the scalar");
    Ok((0..steps)
        .map(|i| min + span * S::from_usize(i).unwrap() / denom)
        .collect())
}

/// Evaluates the sensitivity report across single-row perturbations of
/// `row`, one [`SweepPoint`] per delta, in the given (deterministic) order.
///
/// Deltas that make `P'` empty yield a point with both flags false and all
/// optional cells absent. The exact optimum column is filled only when the
/// instance fits the enumeration oracle's size guard.
pub fn sweep_row<S: Scalar>(
    f: &QuadraticObjective<S>,
    p: &Polytope<S>,
    x: &[S],
    row: usize,
    deltas: &[S],
    tol: S,
) -> Result<Vec<SweepPoint<S>>> {
    if row >= p.num_constraints() {
        return Err(Error::DimensionMismatch {
            context: "swept row index vs constraint rows",
            expected: p.num_constraints(),
            got: row,
        });
    }
    let (gap, pair) = fw::fw_gap(f, p, x)?;
    let lambda_row = pair.dual_prices[row];
    let within_guard = p.dim() <= MAX_ENUM_DIM && p.num_constraints() <= MAX_ENUM_ROWS;

    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mut b_prime = p.b().to_vec();
        b_prime[row] = b_prime[row] + delta;
        let predicted_change = -delta * lambda_row;
        match analyze(f, p, &b_prime, x, tol) {
            Ok(report) => {
                let exact_f_star = if within_guard {
                    let p_prime = p.perturb_rhs(&b_prime)?;
                    match reference::exact_qp_solve(f, &p_prime) {
                        Ok(sol) => Some(sol.f_star),
                        Err(Error::Infeasible) => None,
                        Err(e) => return Err(e),
                    }
                } else {
                    None
                };
                out.push(SweepPoint {
                    delta,
                    gap,
                    lambda_row,
                    predicted_change,
                    eq3_lower: report.eq3.as_ref().map(|b| b.lower),
                    eq3_upper: report.eq3.as_ref().and_then(|b| b.upper),
                    exact_f_star,
                    common_dual: report.common_dual,
                    x_prime_feasible: report.x_prime_feasible,
                });
            }
            Err(Error::Infeasible) => out.push(SweepPoint {
                delta,
                gap,
                lambda_row,
                predicted_change,
                eq3_lower: None,
                eq3_upper: None,
                exact_f_star: None,
                common_dual: false,
                x_prime_feasible: false,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
