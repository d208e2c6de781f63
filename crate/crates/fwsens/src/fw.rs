//! Frank-Wolfe (conditional gradient) minimization over a polytope.
//!
//! The loop is the vanilla method: at the current iterate `x`, ask the
//! linear oracle for `v = argmin_{z in P} grad f(x) z`, measure the gap
//! `grad f(x) (x - v)`, and move towards `v` with an exact line search.
//! The gap both certifies progress (`f(x) - min f <= gap`) and hands back a
//! price vector through the oracle, which downstream sensitivity analysis
//! consumes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, DEFAULT_FEASIBILITY_TOL};
use crate::linalg::{self};
use crate::lp_oracle::{self, PrimalDualPair};
use crate::objective::SmoothObjective;
use crate::scalar::{cast, tol, Scalar};

/// Decomposition weights below this are dropped (with renormalization).
const WEIGHT_PRUNE_TOL: f64 = 1e-12;

/// Step-size rule for the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// Closed-form line search on the segment; requires objective support.
    #[default]
    ExactLineSearch,
    /// The `2 / (t + 2)` schedule; fallback for objectives without an exact
    /// line search.
    OpenLoop,
}

/// Solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwConfig<S> {
    pub max_iter: usize,
    pub gap_tol: S,
    pub record_trace: bool,
    pub step_rule: StepRule,
}

impl<S: Scalar> FwConfig<S> {
    /// Validates `max_iter >= 1` and `gap_tol > 0`.
    pub fn new(max_iter: usize, gap_tol: S) -> Result<Self> {
        if max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1"));
        }
        if gap_tol <= S::zero() || !gap_tol.is_finite() {
            return Err(Error::InvalidConfig("gap_tol must be positive and finite"));
        }
        Ok(FwConfig {
            max_iter,
            gap_tol,
            record_trace: false,
            step_rule: StepRule::ExactLineSearch,
        })
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn with_step_rule(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }
}

/// One atom of the convex decomposition of the iterate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedVertex<S> {
    pub vertex: Vec<S>,
    pub weight: S,
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct FwIteration<S> {
    pub iteration: usize,
    pub f_value: S,
    pub gap: S,
    /// Running maximum of `f(x_t) - gap_t` up to this iteration.
    pub best_lower_bound: S,
}

/// Final state of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct FwResult<S> {
    /// Final iterate.
    pub x: Vec<S>,
    /// Gap at the final iterate.
    pub fw_gap: S,
    /// `f_value - fw_gap`: the lower bound certified at the final iterate.
    pub lower_bound: S,
    /// Best (largest) lower bound certified anywhere along the run.
    pub best_lower_bound: S,
    /// Objective value at the final iterate.
    pub f_value: S,
    /// Number of steps taken.
    pub iterations: usize,
    /// Whether the gap tolerance was met.
    pub converged: bool,
    /// Convex combination reproducing `x`: the starting point plus every
    /// vertex the oracle returned, minus pruned atoms.
    pub decomposition: Vec<WeightedVertex<S>>,
    /// Vertex/price pair from the last oracle call.
    pub last_pair: PrimalDualPair<S>,
    /// Per-iteration records when tracing was requested.
    pub trace: Option<Vec<FwIteration<S>>>,
}

/// Snapshot passed to the observer after each oracle evaluation.
pub struct FwView<'a, S> {
    pub iteration: usize,
    pub x: &'a [S],
    pub f_value: S,
    pub gap: S,
    pub best_lower_bound: S,
    pub pair: &'a PrimalDualPair<S>,
    pub decomposition: &'a [WeightedVertex<S>],
}

/// Gap `grad f(x) (x - v)` and the oracle pair at `x`.
pub fn fw_gap<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    x: &[S],
) -> Result<(S, PrimalDualPair<S>)> {
    require_feasible(p, x)?;
    let g = f.grad(x);
    let pair = lp_oracle::solve_lmo(p, &g)?;
    let gap = linalg::dot(&g, &linalg::sub(x, &pair.vertex));
    Ok((gap, pair))
}

/// Sandwich `f(x) - gap <= min_P f <= f(x)` evaluated at `x`.
pub fn optimal_value_bounds<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    x: &[S],
) -> Result<(S, S)> {
    let (gap, _) = fw_gap(f, p, x)?;
    let fx = f.eval(x);
    Ok((fx - gap, fx))
}

/// Deterministic vertex start: the oracle's answer for the zero objective.
pub fn default_start<S: Scalar>(p: &Polytope<S>) -> Result<Vec<S>> {
    let zero = vec![S::zero(); p.dim()];
    Ok(lp_oracle::solve_lmo(p, &zero)?.vertex)
}

/// Runs the solver from `x0`.
pub fn run_fw<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    x0: &[S],
    cfg: &FwConfig<S>,
) -> Result<FwResult<S>> {
    run_fw_observed(f, p, x0, cfg, |_| {})
}

/// Same as [`run_fw`], invoking `observe` after every oracle evaluation
/// (including the final one). Tests use this to audit per-iterate state.
pub fn run_fw_observed<S: Scalar, O: SmoothObjective<S>>(
    f: &O,
    p: &Polytope<S>,
    x0: &[S],
    cfg: &FwConfig<S>,
    mut observe: impl FnMut(&FwView<'_, S>),
) -> Result<FwResult<S>> {
    if cfg.max_iter == 0 {
        return Err(Error::InvalidConfig("max_iter must be at least 1"));
    }
    if cfg.gap_tol <= S::zero() || !cfg.gap_tol.is_finite() {
        return Err(Error::InvalidConfig("gap_tol must be positive and finite"));
    }
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "objective dimension vs polytope dimension",
            expected: p.dim(),
            got: f.dim(),
        });
    }
    require_feasible(p, x0)?;

    let mut x = x0.to_vec();
    let mut decomposition = vec![WeightedVertex {
        vertex: x.clone(),
        weight: S::one(),
    }];
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut best_lower = S::neg_infinity();
    let mut t = 0usize;

    loop {
        let g = f.grad(&x);
        let pair = lp_oracle::solve_lmo(p, &g)?;
        let gap = linalg::dot(&g, &linalg::sub(&x, &pair.vertex));
        let f_value = f.eval(&x);
        best_lower = best_lower.max(f_value - gap);
        if let Some(rec) = trace.as_mut() {
            rec.push(FwIteration {
                iteration: t,
                f_value,
                gap,
                best_lower_bound: best_lower,
            });
        }
        observe(&FwView {
            iteration: t,
            x: &x,
            f_value,
            gap,
            best_lower_bound: best_lower,
            pair: &pair,
            decomposition: &decomposition,
        });

        let converged = gap <= cfg.gap_tol;
        if converged || t == cfg.max_iter {
            return Ok(FwResult {
                lower_bound: f_value - gap,
                best_lower_bound: best_lower,
                x,
                fw_gap: gap,
                f_value,
                iterations: t,
                converged,
                decomposition,
                last_pair: pair,
                trace,
            });
        }

        let d = linalg::sub(&pair.vertex, &x);
        let gamma = match cfg.step_rule {
            StepRule::ExactLineSearch => {
                f.exact_step(&x, &d).ok_or(Error::LineSearchUnavailable)?
            }
            StepRule::OpenLoop => {
                cast::<S>(2.0) / S::from_usize(t + 2).expect("iteration count fits the scalar")
            }
        };
        if gamma >= S::one() {
            // Full step: land on the vertex exactly rather than through
            // x + (v - x), which would smear round-off over the coordinates.
            x = pair.vertex.clone();
            decomposition = vec![WeightedVertex {
                vertex: pair.vertex.clone(),
                weight: S::one(),
            }];
        } else if gamma > S::zero() {
            x = linalg::add_scaled(&x, gamma, &d);
            let keep = S::one() - gamma;
            for wv in decomposition.iter_mut() {
                wv.weight = wv.weight * keep;
            }
            match decomposition.iter_mut().find(|wv| wv.vertex == pair.vertex) {
                Some(wv) => wv.weight = wv.weight + gamma,
                None => decomposition.push(WeightedVertex {
                    vertex: pair.vertex.clone(),
                    weight: gamma,
                }),
            }
            let prune = tol::<S>(WEIGHT_PRUNE_TOL);
            decomposition.retain(|wv| wv.weight >= prune);
            let total: S = decomposition.iter().map(|wv| wv.weight).sum();
            for wv in decomposition.iter_mut() {
                wv.weight = wv.weight / total;
            }
        }
        t += 1;
    }
}

fn require_feasible<S: Scalar>(p: &Polytope<S>, x: &[S]) -> Result<()> {
    let (row, violation) = p.worst_violation(x)?;
    if violation > tol(DEFAULT_FEASIBILITY_TOL) {
        return Err(Error::InfeasiblePoint {
            row,
            violation: violation.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
