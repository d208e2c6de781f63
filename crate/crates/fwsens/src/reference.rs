//! Independent reference answers for small instances.
//!
//! Nothing here shares code paths with the simplex oracle or the iterative
//! solver: the exact minimizer comes from enumerating active-set candidates,
//! and the linear reference comes from enumerating vertices. Both exist so
//! the fast paths can be cross-checked against something that is slow but
//! obviously right, and so bound reports can be audited against the truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, DEFAULT_FEASIBILITY_TOL, MAX_ENUM_DIM, MAX_ENUM_ROWS};
use crate::linalg::{self, Matrix};
use crate::objective::{QuadraticObjective, SmoothObjective};
use crate::scalar::{tol, Scalar};
use crate::sensitivity::{self, SensitivityReport};

/// Pivot floor for the stationarity systems; candidates whose system is
/// effectively singular are skipped, not mis-solved.
const KKT_PIVOT_TOL: f64 = 1e-11;

/// Multipliers may dip this far below zero before a candidate is rejected.
const MULTIPLIER_TOL: f64 = 1e-9;

/// Audited inequalities may miss by this much and still count as holding.
pub const AUDIT_SLACK_TOL: f64 = 1e-7;

/// Exact constrained minimizer of a convex quadratic over a polytope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution<S> {
    pub x_star: Vec<S>,
    pub f_star: S,
    /// Rows active at `x_star` within the default feasibility tolerance.
    pub active_rows: Vec<usize>,
}

/// Solves `min (1/2) x' Q x + c x + r` over `{ z : A z <= b }` exactly by
/// enumerating active sets.
///
/// For every row subset `E` with at most `dim` rows, the stationarity
/// system
///
/// ```text
///   [ Q   A_E' ] [x ]   [ -c  ]
///   [ A_E  0   ] [mu] = [ b_E ]
/// ```
///
/// is solved; a candidate survives if it is feasible and its multipliers
/// are nonnegative. The best surviving value wins, ties broken by the
/// lexicographically smaller point. A bounded nonempty polytope is pointed,
/// its optimal face contains a vertex, and the subset defining that vertex
/// yields a nonsingular system with the (unique, nonnegative) multipliers
/// of the minimizer, so the enumeration never comes back empty.
///
/// Limited to `dim <= 8`, `rows <= 16`; unbounded polytopes are rejected so
/// the vertex argument above stands.
pub fn exact_qp_solve<S: Scalar>(
    f: &QuadraticObjective<S>,
    p: &Polytope<S>,
) -> Result<ExactSolution<S>> {
    let n = p.dim();
    let m = p.num_constraints();
    if n > MAX_ENUM_DIM || m > MAX_ENUM_ROWS {
        return Err(Error::SizeGuard {
            dim: n,
            rows: m,
            max_dim: MAX_ENUM_DIM,
            max_rows: MAX_ENUM_ROWS,
        });
    }
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "objective vs polytope dimension",
            expected: n,
            got: f.dim(),
        });
    }
    if !p.assert_bounded()? {
        return Err(Error::Unbounded);
    }

    let feas_tol = tol::<S>(DEFAULT_FEASIBILITY_TOL);
    let mult_tol = tol::<S>(MULTIPLIER_TOL);
    let pivot_tol = tol::<S>(KKT_PIVOT_TOL);
    let q = f.q();
    let c = f.c_lin();

    let mut best: Option<(Vec<S>, S)> = None;
    for mask in 0u32..(1u32 << m) {
        let k = mask.count_ones() as usize;
        if k > n {
            continue;
        }
        let rows: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();

        let size = n + k;
        let mut kkt = Matrix::zeros(size, size);
        let mut rhs = vec![S::zero(); size];
        for i in 0..n {
            for j in 0..n {
                kkt.set(i, j, q.get(i, j));
            }
            rhs[i] = -c[i];
        }
        for (t, &row) in rows.iter().enumerate() {
            let a_row = p.row(row);
            for (j, &aj) in a_row.iter().enumerate() {
                kkt.set(n + t, j, aj);
                kkt.set(j, n + t, aj);
            }
            rhs[n + t] = p.b()[row];
        }

        let sol = match linalg::solve(&kkt, &rhs, pivot_tol) {
            Some(sol) => sol,
            None => continue,
        };
        let x = &sol[..n];
        if sol[n..].iter().any(|mu| *mu < -mult_tol) {
            continue;
        }
        let (_, violation) = p.worst_violation(x)?;
        if violation > feas_tol {
            continue;
        }

        let value = f.eval(x);
        let better = match &best {
            None => true,
            Some((bx, bv)) => value < *bv || (value == *bv && lex_less(x, bx)),
        };
        if better {
            best = Some((x.to_vec(), value));
        }
    }

    let (x_star, f_star) = best.expect("bounded nonempty polytope yields a candidate");
    let active_rows = p
        .slack(&x_star)?
        .iter()
        .enumerate()
        .filter(|(_, s)| s.abs() <= feas_tol)
        .map(|(i, _)| i)
        .collect();
    Ok(ExactSolution {
        x_star,
        f_star,
        active_rows,
    })
}

/// Minimizes a linear objective by scanning every vertex.
///
/// Returns `Ok(None)` when the polytope has no vertices (empty, vertex-free,
/// or fewer rows than dimensions); ties prefer the lexicographically
/// smaller vertex. Subject to the same size guard as vertex enumeration.
pub fn brute_force_lp<S: Scalar>(p: &Polytope<S>, c: &[S]) -> Result<Option<(Vec<S>, S)>> {
    if c.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "objective vs polytope dimension",
            expected: p.dim(),
            got: c.len(),
        });
    }
    let mut best: Option<(Vec<S>, S)> = None;
    for v in p.enumerate_vertices()? {
        let value = linalg::dot(c, &v);
        let better = match &best {
            None => true,
            Some((bv, bval)) => value < *bval || (value == *bval && lex_less(&v, bv)),
        };
        if better {
            best = Some((v, value));
        }
    }
    Ok(best)
}

fn lex_less<S: Scalar>(a: &[S], b: &[S]) -> bool {
    for (ai, bi) in a.iter().zip(b) {
        if ai < bi {
            return true;
        }
        if ai > bi {
            return false;
        }
    }
    false
}

/// One audited inequality: `slack >= 0` means it holds outright.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry<S> {
    pub name: &'static str,
    /// False when the inequality's hypothesis failed, so there was nothing
    /// to check; such entries never fail the audit.
    pub applicable: bool,
    pub slack: S,
    pub holds: bool,
}

/// Bound report checked against exact optima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport<S> {
    pub report: SensitivityReport<S>,
    pub exact_f: S,
    pub exact_f_prime: S,
    pub entries: Vec<AuditEntry<S>>,
    /// True iff every applicable entry holds within [`AUDIT_SLACK_TOL`].
    pub pass: bool,
}

/// Runs the sensitivity analysis at `x` and audits every claimed bound
/// against the exact optima of the original and perturbed problems.
///
/// Inherits the enumeration size guard; an empty perturbed polytope is an
/// error because there is no optimum to audit against.
pub fn sandwich_audit<S: Scalar>(
    f: &QuadraticObjective<S>,
    p: &Polytope<S>,
    b_prime: &[S],
    x: &[S],
    tol: S,
) -> Result<AuditReport<S>> {
    let report = sensitivity::analyze(f, p, b_prime, x, tol)?;
    let exact_f = exact_qp_solve(f, p)?.f_star;
    let p_prime = p.perturb_rhs(b_prime)?;
    let exact_f_prime = exact_qp_solve(f, &p_prime)?.f_star;
    Ok(audit_report(report, exact_f, exact_f_prime))
}

/// Assembles the audit table from an existing report and exact optima.
pub fn audit_report<S: Scalar>(
    report: SensitivityReport<S>,
    exact_f: S,
    exact_f_prime: S,
) -> AuditReport<S> {
    let tol = tol::<S>(AUDIT_SLACK_TOL);
    let width_target = report.gap + report.curvature_term;

    let mut entries = Vec::with_capacity(8);
    let mut push = |name: &'static str, slack: Option<S>| {
        let applicable = slack.is_some();
        let slack = slack.unwrap_or_else(S::zero);
        entries.push(AuditEntry {
            name,
            applicable,
            slack,
            holds: !applicable || slack >= -tol,
        });
    };

    push("eq1_lower_below_exact", Some(exact_f - report.eq1.lower));
    push("eq1_upper_above_exact", Some(report.eq1.upper - exact_f));
    push(
        "eq2_lower_below_exact_prime",
        Some(exact_f_prime - report.eq2.lower),
    );
    push(
        "eq2_upper_above_exact_prime",
        report.eq2.upper.map(|u| u - exact_f_prime),
    );
    push(
        "eq3_lower_below_exact_prime",
        report.eq3.as_ref().map(|b| exact_f_prime - b.lower),
    );
    push(
        "eq3_upper_above_exact_prime",
        report.eq3.as_ref().and_then(|b| b.upper).map(|u| u - exact_f_prime),
    );
    push(
        "eq2_width_matches_gap_plus_curvature",
        report
            .eq2
            .upper
            .map(|u| -((u - report.eq2.lower) - width_target).abs()),
    );
    push(
        "eq3_width_matches_gap_plus_curvature",
        report
            .eq3
            .as_ref()
            .and_then(|b| b.upper.map(|u| -((u - b.lower) - width_target).abs())),
    );

    let pass = entries.iter().all(|e| e.holds);
    AuditReport {
        report,
        exact_f,
        exact_f_prime,
        entries,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_oracle;

    fn unit_square() -> Polytope<f64> {
        Polytope::from_rows(
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![-1.0, 0.0],
                vec![0.0, -1.0],
            ],
            vec![1.0, 1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    fn worked_objective() -> QuadraticObjective<f64> {
        QuadraticObjective::new(
            Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            vec![-2.0, -0.5],
            2.125,
        )
        .unwrap()
    }

    #[test]
    fn boundary_minimum_on_the_square() {
        let sol = exact_qp_solve(&worked_objective(), &unit_square()).unwrap();
        assert!((sol.x_star[0] - 1.0).abs() < 1e-9);
        assert!((sol.x_star[1] - 0.5).abs() < 1e-9);
        assert!((sol.f_star - 0.5).abs() < 1e-12);
        assert_eq!(sol.active_rows, vec![0]);
    }

    #[test]
    fn interior_minimum_has_no_active_rows() {
        // (1/2) ||x - (0.25, 0.25)||^2 over the square.
        let f = QuadraticObjective::new(
            Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            vec![-0.25, -0.25],
            0.0625,
        )
        .unwrap();
        let sol = exact_qp_solve(&f, &unit_square()).unwrap();
        assert!((sol.x_star[0] - 0.25).abs() < 1e-12);
        assert!((sol.x_star[1] - 0.25).abs() < 1e-12);
        assert!(sol.f_star.abs() < 1e-15);
        assert!(sol.active_rows.is_empty());
    }

    #[test]
    fn zero_curvature_reduces_to_the_linear_case() {
        // min -z1 - 2 z2 over the 2-simplex; the optimum is the vertex (0, 1).
        let p: Polytope<f64> = Polytope::from_rows(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let f = QuadraticObjective::new(Matrix::zeros(2, 2), vec![-1.0, -2.0], 0.0).unwrap();
        let sol = exact_qp_solve(&f, &p).unwrap();
        assert_eq!(sol.x_star, vec![0.0, 1.0]);
        assert_eq!(sol.f_star, -2.0);

        let (bv, bval) = brute_force_lp(&p, &[-1.0, -2.0]).unwrap().unwrap();
        assert_eq!(bv, vec![0.0, 1.0]);
        assert_eq!(bval, -2.0);
        let pair = lp_oracle::solve_lmo(&p, &[-1.0, -2.0]).unwrap();
        assert!((pair.value - bval).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cases_are_classified() {
        let empty =
            Polytope::from_rows(vec![vec![1.0], vec![-1.0]], vec![-1.0, 0.0]).unwrap();
        assert_eq!(
            exact_qp_solve(&one_dim_objective(), &empty).unwrap_err(),
            Error::Infeasible
        );
        let halfline = Polytope::from_rows(vec![vec![-1.0]], vec![0.0]).unwrap();
        assert_eq!(
            exact_qp_solve(&one_dim_objective(), &halfline).unwrap_err(),
            Error::Unbounded
        );
    }

    fn one_dim_objective() -> QuadraticObjective<f64> {
        QuadraticObjective::new(Matrix::zeros(1, 1), vec![1.0], 0.0).unwrap()
    }

    #[test]
    fn size_guard_refuses_large_instances() {
        let n = 9;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let p = Polytope::from_rows(rows, vec![1.0; n]).unwrap();
        let f = QuadraticObjective::new(Matrix::zeros(n, n), vec![0.0; n], 0.0).unwrap();
        assert!(matches!(
            exact_qp_solve(&f, &p).unwrap_err(),
            Error::SizeGuard { .. }
        ));
    }

    #[test]
    fn vertex_scan_breaks_value_ties_lexicographically() {
        // c = (1, 0): both (0, 0) and (0, 1) cost 0; the scan prefers (0, 0).
        let (v, value) = brute_force_lp(&unit_square(), &[1.0, 0.0])
            .unwrap()
            .unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
        assert_eq!(value, 0.0);
        let pair = lp_oracle::solve_lmo(&unit_square(), &[1.0, 0.0]).unwrap();
        assert!((pair.value - value).abs() < 1e-12);
    }

    #[test]
    fn vertex_free_polytopes_scan_to_none() {
        // One row in two variables: no vertex can exist.
        let slab: Polytope<f64> =
            Polytope::from_rows(vec![vec![1.0, 1.0]], vec![1.0]).unwrap();
        assert_eq!(brute_force_lp(&slab, &[1.0, 0.0]).unwrap(), None);
        // A halfline does have a vertex, at its endpoint.
        let halfline = Polytope::from_rows(vec![vec![-1.0]], vec![0.0]).unwrap();
        let (v, value) = brute_force_lp(&halfline, &[1.0]).unwrap().unwrap();
        assert_eq!(v[0], 0.0);
        assert_eq!(value, 0.0);
    }

    #[test]
    fn audit_passes_on_the_worked_example() {
        let audit = sandwich_audit(
            &worked_objective(),
            &unit_square(),
            &[1.1, 1.0, 0.0, 0.0],
            &[1.0, 0.5],
            1e-9,
        )
        .unwrap();
        assert!(audit.pass);
        assert_eq!(audit.entries.len(), 8);
        assert!(audit.entries.iter().all(|e| e.applicable));
        assert!((audit.exact_f - 0.5).abs() < 1e-12);
        assert!((audit.exact_f_prime - 0.405).abs() < 1e-9);
        // At the exact optimum the first sandwich is tight on both sides.
        assert!(audit.entries[0].slack.abs() < 1e-9);
        assert!(audit.entries[1].slack.abs() < 1e-9);
    }

    #[test]
    fn audit_skips_uppers_when_translation_fails() {
        let audit = sandwich_audit(
            &worked_objective(),
            &unit_square(),
            &[1.1, 1.0, 0.0, -0.6],
            &[1.0, 0.5],
            1e-9,
        )
        .unwrap();
        assert!(audit.pass, "lower bounds alone must still hold");
        let by_name = |name: &str| {
            audit
                .entries
                .iter()
                .find(|e| e.name == name)
                .unwrap()
                .clone()
        };
        assert!(!by_name("eq2_upper_above_exact_prime").applicable);
        assert!(!by_name("eq3_upper_above_exact_prime").applicable);
        assert!(by_name("eq2_lower_below_exact_prime").applicable);
        // x1 relaxes to 1.1 and the x2 floor rises to 0.6: optimum (1.1, 0.6).
        assert!((audit.exact_f_prime - 0.41).abs() < 1e-9);
    }

    /// Delegates everything but claims half the true smoothness.
    struct Understated<'a>(&'a QuadraticObjective<f64>);

    impl SmoothObjective<f64> for Understated<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn eval(&self, x: &[f64]) -> f64 {
            self.0.eval(x)
        }
        fn grad(&self, x: &[f64]) -> Vec<f64> {
            self.0.grad(x)
        }
        fn smoothness(&self) -> f64 {
            self.0.smoothness() / 2.0
        }
    }

    #[test]
    fn audit_catches_an_understated_smoothness_constant() {
        let p = unit_square();
        let f = worked_objective();
        let b_prime = [1.1, 1.0, 0.0, 0.0];
        let report =
            sensitivity::analyze(&Understated(&f), &p, &b_prime, &[1.0, 0.5], 1e-9).unwrap();
        let exact_f = exact_qp_solve(&f, &p).unwrap().f_star;
        let p_prime = p.perturb_rhs(&b_prime).unwrap();
        let exact_f_prime = exact_qp_solve(&f, &p_prime).unwrap().f_star;

        let audit = audit_report(report, exact_f, exact_f_prime);
        assert!(!audit.pass);
        let bad = audit
            .entries
            .iter()
            .find(|e| e.name == "eq3_upper_above_exact_prime")
            .unwrap();
        // Claimed upper 0.5 - 0.1 + 0.0025 = 0.4025 sits below the true 0.405.
        assert!(bad.applicable && !bad.holds);
        assert!((bad.slack + 0.0025).abs() < 1e-9);
    }
}
