//! Numeric traits the rest of the crate is generic over.
//!
//! Two families are used:
//!
//! * [`Scalar`] carries combined scores and tier boundaries. Any type that can
//!   represent halves exactly works: `f32`, `f64`, or the exact rational
//!   [`Score`](crate::Score) used by default.
//! * [`Real`] carries probabilities, skills and durations inside the combat
//!   model (`f32` or `f64`).

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Score arithmetic: exact rationals or floating point.
pub trait Scalar: Num + FromPrimitive + ToPrimitive + PartialOrd + Copy + Debug {
    /// `n / 2`, the granularity at which tier boundaries are printed.
    fn from_halves(n: i64) -> Self {
        let two = Self::one() + Self::one();
        Self::from_i64(n).expect("half-point value fits the scalar type") / two
    }
}

impl<T> Scalar for T where T: Num + FromPrimitive + ToPrimitive + PartialOrd + Copy + Debug {}

/// Floating point: f32 or f64.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal converts to Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
