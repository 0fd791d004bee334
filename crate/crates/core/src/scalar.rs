//! Scalar abstraction for the numeric core.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the engine computes with. Implemented by `f32` and
/// `f64`; the CLI pins `f64` via the crate-root aliases.
pub trait Real: Float + FromPrimitive + Sum + Debug + Display + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Sum + Debug + Display + 'static {}

/// Converts an `f64` constant into the working scalar type.
/// Panics only if the type cannot represent ordinary finite constants,
/// which no `Real` implementor of interest does.
#[inline]
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("finite constant representable in scalar type")
}

/// Logistic function, numerically stable on both tails.
#[inline]
pub fn expit<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Log-odds of `p`; caller is responsible for keeping `p` inside (0, 1).
#[inline]
pub fn logit<F: Real>(p: F) -> F {
    (p / (F::one() - p)).ln()
}
