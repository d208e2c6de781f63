//! Floating-point abstraction used by every numeric routine in this crate.
//!
//! All solvers are written against [`Scalar`] instead of a concrete float so
//! the same code runs in `f64` (the default throughout the tests and the CLI)
//! and `f32`. The crate root exposes concrete aliases such as
//! [`crate::Polytope64`] for callers that do not care about the generics.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Scalar type the solvers operate on.
///
/// `Float` supplies arithmetic, comparisons and `NumCast`; `FromPrimitive`
/// covers index-to-scalar conversions in step-size rules. The remaining
/// bounds let errors print values and keep results sendable across threads.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant (tolerances, fixed factors) into `S`.
///
/// Every constant used by this crate is exactly representable in `f32` and
/// `f64`, so the conversion cannot fail for the provided impls.
pub(crate) fn cast<S: Scalar>(v: f64) -> S {
    S::from(v).expect("constant must be representable in the scalar type")
}

/// Scales a double-precision-calibrated tolerance to the precision of `S`.
///
/// Attainable accuracy of the inner products behind every residual grows
/// roughly with the square root of the machine epsilon ratio, so the
/// tolerance grows the same way. For `f64` the factor is exactly 1 and the
/// constant passes through bitwise unchanged.
pub(crate) fn tol<S: Scalar>(f64_tol: f64) -> S {
    let ratio = S::epsilon().to_f64().expect("epsilon is a small float") / f64::EPSILON;
    cast::<S>(f64_tol * ratio.sqrt())
}
