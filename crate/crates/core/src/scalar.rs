//! Scalar abstraction: the numerics are written once over any IEEE float.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar type the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
