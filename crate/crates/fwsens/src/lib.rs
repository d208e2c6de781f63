//! Frank-Wolfe over polytopes, with prices and perturbation bounds.
//!
//! This crate minimizes smooth convex quadratics over feasible sets of the
//! form `{ z : A z <= b }`. Three pieces cooperate:
//!
//! * a projection-free solver ([`run_fw`]) whose iterates are convex
//!   combinations of vertices and which reports a duality gap every
//!   iteration, so any iterate sandwiches the optimal value;
//! * a vertex oracle ([`solve_lmo`]) that minimizes linear functions over
//!   the polytope and returns certified dual prices alongside the vertex;
//! * a sensitivity layer ([`analyze`]) that turns one gap and one price
//!   vector into two-sided bounds on the optimal value after the right-hand
//!   side `b` changes, without re-solving anything.
//!
//! Enumeration-based reference oracles ([`exact_qp_solve`],
//! [`brute_force_lp`]) provide independent ground truth on small instances,
//! and [`sandwich_audit`] checks every claimed bound against it.
//!
//! All numeric code is generic over the scalar precision via [`Scalar`]
//! (implemented for `f32` and `f64`); the `*F64` / `*F32` aliases below pin
//! the common concrete choices. Results are deterministic: the same inputs
//! produce bitwise-identical outputs, including every tie-break.
//!
//! ```
//! use fwsens::{FwConfig, Matrix, Polytope, PolytopeF64, QuadraticObjective};
//!
//! // Minimize (1/2) ||x - (2, 0.5)||^2 over the unit square.
//! let p: PolytopeF64 = Polytope::from_rows(
//!     vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
//!     vec![1.0, 1.0, 0.0, 0.0],
//! )?;
//! let f = QuadraticObjective::new(
//!     Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]])?,
//!     vec![-2.0, -0.5],
//!     2.125,
//! )?;
//! let start = fwsens::default_start(&p)?;
//! let run = fwsens::run_fw(&f, &p, &start, &FwConfig::new(500, 1e-10)?)?;
//! assert!(run.converged);
//! assert!((run.f_value - 0.5).abs() < 1e-9);
//!
//! // Raise the first bound by 0.1 and sandwich the new optimal value,
//! // which moves to 0.405: the bracket [0.4, 0.405] is tight from above.
//! let report = fwsens::analyze(&f, &p, &[1.1, 1.0, 0.0, 0.0], &run.x, 1e-9)?;
//! let bounds = report.eq3.expect("the prices transfer to the new set");
//! assert!((bounds.lower - 0.4).abs() < 1e-9);
//! assert!((bounds.upper.unwrap() - 0.405).abs() < 1e-9);
//! # Ok::<(), fwsens::Error>(())
//! ```

#![forbid(unsafe_code)]

/// Keeps the README example compiling.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;

pub mod error;
pub mod fw;
pub mod geometry;
pub mod linalg;
pub mod lp_oracle;
pub mod objective;
pub mod reference;
pub mod scalar;
pub mod sensitivity;

pub use error::{Error, Result};
pub use fw::{
    default_start, fw_gap, optimal_value_bounds, run_fw, run_fw_observed, FwConfig, FwIteration,
    FwResult, FwView, StepRule, WeightedVertex,
};
pub use geometry::{ActiveSplit, Polytope, DEFAULT_FEASIBILITY_TOL};
pub use linalg::Matrix;
pub use lp_oracle::{
    complementarity_gap, solve_lmo, verify_certificate, CertificateReport, PrimalDualPair,
};
pub use objective::{
    check_gradient_fd, exact_line_search, QuadraticObjective, SmoothObjective,
};
pub use reference::{
    audit_report, brute_force_lp, exact_qp_solve, sandwich_audit, AuditEntry, AuditReport,
    ExactSolution, AUDIT_SLACK_TOL,
};
pub use scalar::Scalar;
pub use sensitivity::{
    analyze, certify_optimality, check_common_dual, check_translation, delta_grid,
    minimal_face_check, shrink_delta_until_flags, sweep_row, Interval, SensitivityReport,
    SweepPoint, TranslationCheck, ValueBounds,
};

/// Double-precision dense matrix.
pub type MatrixF64 = Matrix<f64>;
/// Single-precision dense matrix.
pub type MatrixF32 = Matrix<f32>;
/// Double-precision polytope.
pub type PolytopeF64 = Polytope<f64>;
/// Single-precision polytope.
pub type PolytopeF32 = Polytope<f32>;
/// Double-precision quadratic objective.
pub type QuadraticObjectiveF64 = QuadraticObjective<f64>;
/// Single-precision quadratic objective.
pub type QuadraticObjectiveF32 = QuadraticObjective<f32>;
/// Double-precision solver configuration.
pub type FwConfigF64 = FwConfig<f64>;
/// Single-precision solver configuration.
pub type FwConfigF32 = FwConfig<f32>;
/// Double-precision solver outcome.
pub type FwResultF64 = FwResult<f64>;
/// Single-precision solver outcome.
pub type FwResultF32 = FwResult<f32>;
/// Double-precision vertex/price pair.
pub type PrimalDualPairF64 = PrimalDualPair<f64>;
/// Single-precision vertex/price pair.
pub type PrimalDualPairF32 = PrimalDualPair<f32>;
/// Double-precision sensitivity report.
pub type SensitivityReportF64 = SensitivityReport<f64>;
/// Single-precision sensitivity report.
pub type SensitivityReportF32 = SensitivityReport<f32>;
