//! Scalar abstraction and numerically hardened elementary functions.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar type the whole solver is generic over.
///
/// Implemented for `f32` and `f64`. All tolerances in the crate are stated
/// for `f64`; the `f32` instantiation is provided for storage-constrained
/// uses and is tested for compilation and basic behaviour only.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into `Self`, rounding if needed.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant converts to scalar")
    }

    /// Converts a `usize` (round counters, dimensions) into `Self`.
    fn from_usize_c(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `log(1 + exp(z))` without overflow for large `|z|`.
///
/// Uses the identity `softplus(z) = max(z, 0) + log1p(exp(-|z|))`.
pub fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// Logistic function `1 / (1 + exp(-z))` evaluated without overflow.
pub fn logistic<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}
