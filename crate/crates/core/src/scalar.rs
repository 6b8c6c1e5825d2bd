//! Floating-point scalar abstraction.
//!
//! All propagation math in this crate is generic over [`Scalar`] so the same
//! formulas run in `f32` or `f64`. The crate root exports `f64` aliases for
//! the common types; `f64` is what the CLI and the reference tolerances use.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Speed of light in m/s, used for every frequency/wavelength conversion.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + fmt::Debug + fmt::Display + 'static
{
    /// Convert an `f64` literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Speed of light in m/s.
    fn speed_of_light() -> Self {
        Self::of(SPEED_OF_LIGHT_M_S)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
