//! Scalar abstraction for the numeric core.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the solver is generic over.
///
/// `f64` is the working type; `f32` satisfies the bounds but does not reach
/// the tight oracle tolerances.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion of literals and f64 constants.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar built on [`Real`].
pub type Cplx<F> = Complex<F>;

#[inline]
pub fn c<F: Real>(re: F, im: F) -> Cplx<F> {
    Complex::new(re, im)
}

/// i * x for a real x.
#[inline]
pub fn imag<F: Real>(x: F) -> Cplx<F> {
    Complex::new(F::zero(), x)
}
