//! Smooth convex objectives.
//!
//! The solver only needs three capabilities from an objective: evaluation,
//! the gradient (as a row vector), and a smoothness constant `L` with
//! `f(y) <= f(x) + grad f(x) (y - x) + (L/2) ||y - x||^2`. Quadratics
//! `f(x) = (1/2) x^T Q x + c x + r` with symmetric positive semidefinite `Q`
//! are the only objective shipped; they additionally support an exact line
//! search, which the solver uses by default.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{cast, tol, Scalar};

/// Symmetry slack accepted before construction fails.
const SYMMETRY_TOL: f64 = 1e-12;

/// Smallest eigenvalue the quadratic term may have.
const PSD_TOL: f64 = -1e-9;

/// Relative tolerance of the power-iteration smoothness estimate.
const POWER_REL_TOL: f64 = 1e-8;

/// Inflation applied to the converged power-iteration estimate so the
/// returned constant sits on the safe side of the top eigenvalue while
/// staying within a factor `1 + 1e-6` of it.
const POWER_INFLATION: f64 = 5e-7;

/// Capabilities the solver requires from an objective.
pub trait SmoothObjective<S: Scalar> {
    /// Ambient dimension of the domain.
    fn dim(&self) -> usize;

    /// Function value at `x`.
    fn eval(&self, x: &[S]) -> S;

    /// Gradient at `x`, returned as a dense row vector.
    fn grad(&self, x: &[S]) -> Vec<S>;

    /// A smoothness constant valid on the whole domain.
    fn smoothness(&self) -> S;

    /// Exact minimizer of `gamma -> f(x + gamma d)` over `[0, 1]`, when the
    /// objective supports it in closed form.
    fn exact_step(&self, _x: &[S], _d: &[S]) -> Option<S> {
        None
    }
}

/// `f(x) = (1/2) x^T Q x + c_lin x + r` with `Q` symmetric PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective<S> {
    q: Matrix<S>,
    c_lin: Vec<S>,
    r: S,
    smoothness: S,
}

impl<S: Scalar> QuadraticObjective<S> {
    /// Builds the objective, symmetrizing `Q` and certifying it is positive
    /// semidefinite within tolerance. Construction fails loudly otherwise.
    pub fn new(q: Matrix<S>, c_lin: Vec<S>, r: S) -> Result<Self> {
        if q.rows() != q.cols() {
            return Err(Error::InvalidShape(format!(
                "quadratic term must be square, got {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        if c_lin.len() != q.rows() {
            return Err(Error::DimensionMismatch {
                context: "linear term vs quadratic term dimension",
                expected: q.rows(),
                got: c_lin.len(),
            });
        }
        if !q.is_finite() || !c_lin.iter().all(|v| v.is_finite()) || !r.is_finite() {
            return Err(Error::NonFinite("objective coefficients"));
        }
        let sym = q.symmetrized();
        if q.max_abs_diff(&sym) > tol(SYMMETRY_TOL) {
            // Large asymmetry is almost always a data bug; the symmetrized
            // matrix would silently change the function the caller meant.
            return Err(Error::InvalidShape(
                "quadratic term deviates from symmetry by more than 1e-12".into(),
            ));
        }
        let min_eig = linalg::symmetric_eigenvalues(&sym)[0];
        if min_eig < tol(PSD_TOL) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig.to_f64().unwrap_or(f64::NAN),
            });
        }
        let smoothness = largest_eigenvalue_upper_bound(&sym);
        Ok(QuadraticObjective {
            q: sym,
            c_lin,
            r,
            smoothness,
        })
    }

    pub fn q(&self) -> &Matrix<S> {
        &self.q
    }

    pub fn c_lin(&self) -> &[S] {
        &self.c_lin
    }

    pub fn r(&self) -> S {
        self.r
    }
}

impl<S: Scalar> SmoothObjective<S> for QuadraticObjective<S> {
    fn dim(&self) -> usize {
        self.c_lin.len()
    }

    fn eval(&self, x: &[S]) -> S {
        debug_assert_eq!(x.len(), self.dim());
        let qx = self.q.matvec(x);
        cast::<S>(0.5) * linalg::dot(x, &qx) + linalg::dot(&self.c_lin, x) + self.r
    }

    fn grad(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.dim());
        let mut g = self.q.matvec(x);
        for (gi, ci) in g.iter_mut().zip(&self.c_lin) {
            *gi = *gi + *ci;
        }
        g
    }

    fn smoothness(&self) -> S {
        self.smoothness
    }

    fn exact_step(&self, x: &[S], d: &[S]) -> Option<S> {
        Some(exact_line_search(self, x, d))
    }
}

/// Minimizer of `gamma -> f(x + gamma d)` over `[0, 1]` for a quadratic.
///
/// `gamma* = clip(-grad f(x) d / (d^T Q d), 0, 1)`. When the curvature
/// `d^T Q d` is numerically zero the objective is linear along `d`: the step
/// is `1` for a descent direction and `0` otherwise.
pub fn exact_line_search<S: Scalar>(f: &QuadraticObjective<S>, x: &[S], d: &[S]) -> S {
    let slope = linalg::dot(&f.grad(x), d);
    let curvature = linalg::dot(d, &f.q().matvec(d));
    if curvature <= tol(1e-14) {
        return if slope < S::zero() { S::one() } else { S::zero() };
    }
    (-slope / curvature).max(S::zero()).min(S::one())
}

/// Largest absolute componentwise error between the analytic gradient and a
/// central finite difference with step `h`.
pub fn check_gradient_fd<S: Scalar>(f: &impl SmoothObjective<S>, x: &[S], h: S) -> S {
    let grad = f.grad(x);
    let mut worst = S::zero();
    let mut probe = x.to_vec();
    let two_h = cast::<S>(2.0) * h;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let plus = f.eval(&probe);
        probe[i] = x[i] - h;
        let minus = f.eval(&probe);
        probe[i] = x[i];
        let fd = (plus - minus) / two_h;
        worst = worst.max((fd - grad[i]).abs());
    }
    worst
}

/// Tight upper bound on the largest eigenvalue of a symmetric PSD matrix.
///
/// Power iteration with a deterministic start runs until the Rayleigh
/// quotient stabilizes to relative tolerance `1e-8` (measured over a short
/// window so near-degenerate spectra do not trigger a premature stop); the
/// converged estimate is inflated by `5e-7` to sit above the eigenvalue it
/// approaches from below. The result is clamped between the largest diagonal
/// entry (a lower bound) and the Gershgorin row bound (an upper bound), and
/// the Gershgorin bound alone is returned if the iteration fails to settle.
fn largest_eigenvalue_upper_bound<S: Scalar>(q: &Matrix<S>) -> S {
    let n = q.rows();
    let mut gershgorin = S::zero();
    let mut max_diag = S::zero();
    for i in 0..n {
        let mut radius = S::zero();
        for j in 0..n {
            if i != j {
                radius = radius + q.get(i, j).abs();
            }
        }
        gershgorin = gershgorin.max(q.get(i, i) + radius);
        max_diag = max_diag.max(q.get(i, i));
    }
    if gershgorin <= S::zero() {
        // PSD with nonpositive Gershgorin bound means Q is (numerically) zero.
        return S::zero();
    }

    let mut u: Vec<S> = (0..n)
        .map(|i| S::one() + cast::<S>(0.25) * S::from(i + 1).unwrap() / S::from(n).unwrap())
        .collect();
    let norm = linalg::norm2_sq(&u).sqrt();
    for ui in u.iter_mut() {
        *ui = *ui / norm;
    }
    let rel_tol = tol::<S>(POWER_REL_TOL);
    let window = 8;
    let mut history: Vec<S> = Vec::new();
    let mut rho = S::zero();
    let mut converged = false;
    for _ in 0..20_000 {
        let qu = q.matvec(&u);
        rho = linalg::dot(&u, &qu);
        history.push(rho);
        if history.len() > window {
            let past = history[history.len() - 1 - window];
            if (rho - past).abs() <= rel_tol * rho.max(S::epsilon()) {
                converged = true;
                break;
            }
        }
        let norm = linalg::norm2_sq(&qu).sqrt();
        if norm <= S::epsilon() * cast(1e2) {
            // Start vector lies in the kernel; the matrix is numerically zero
            // on the reachable subspace.
            rho = S::zero();
            converged = true;
            break;
        }
        u = qu.iter().map(|v| *v / norm).collect();
    }
    if !converged {
        return gershgorin;
    }
    let inflated = rho * (S::one() + tol(POWER_INFLATION));
    inflated.max(max_diag).min(gershgorin)
}
