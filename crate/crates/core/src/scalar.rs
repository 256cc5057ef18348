//! Scalar abstraction shared by the matrix, Clifford and series code.
//!
//! Exact constructions (gamma matrices, Clifford monomial arithmetic, series
//! coefficients) only need ring operations, so they are written against
//! [`Scalar`]. Anything that takes square roots, exponentials or
//! trigonometric functions additionally requires [`Real`].

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// A commutative ring scalar with exact or floating-point semantics.
///
/// Implemented for `i64`, `f32`, `f64` and the rational types from
/// `num-rational`.
pub trait Scalar: Clone + PartialEq + Debug + Num + Neg<Output = Self> + ToPrimitive + Send + Sync + 'static {
    /// Lossy view used for residual reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Clone + PartialEq + Debug + Num + Neg<Output = T> + ToPrimitive + Send + Sync + 'static {}

/// Floating-point scalars (`f32`, `f64`).
pub trait Real: Scalar + Float + FloatConst + FromPrimitive + Copy {
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }
}

impl<T> Real for T where T: Scalar + Float + FloatConst + FromPrimitive + Copy {}
