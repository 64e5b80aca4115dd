//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar the solvers are generic over. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every literal used by the crate is representable.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Converts a count.
    #[inline]
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }

    /// Machine precision `ε_M`.
    #[inline]
    fn eps_m() -> Self {
        Self::epsilon()
    }

    /// `√ε_M`, used as a relative safeguard threshold throughout.
    #[inline]
    fn sqrt_eps() -> Self {
        Self::epsilon().sqrt()
    }

    /// `ε_M^{2/3}`, the near-optimal classification factor.
    #[inline]
    fn eps_two_thirds() -> Self {
        Self::epsilon().powf(Self::c(2.0 / 3.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
