//! Scalar abstraction: the whole crate is generic over the real field
//! used for amplitudes and probabilities (`f32` or `f64`).

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type backing complex amplitudes, probabilities and entropies.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + fmt::Debug + fmt::Display + 'static
{
    /// Lossy cast from `f64`, for literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Cast to `f64` for reporting and sampling.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// Orthonormality / Hermiticity / unitarity tolerance.
    ///
    /// 1e-9 for f64; widened to the precision floor for narrower types.
    fn validation_tol() -> Self {
        Self::of(1e-9).max(Self::epsilon() * Self::of(100.0))
    }

    /// Eigenvalues below this contribute nothing to entropies (0·log 0 := 0).
    fn entropy_clip() -> Self {
        Self::of(1e-12).max(Self::epsilon() * Self::of(10.0))
    }

    /// Concurrence threshold splitting product / nonmaximal / maximal classes.
    fn class_tol() -> Self {
        Self::of(1e-6)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
