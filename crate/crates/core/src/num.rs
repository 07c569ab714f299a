//! Scalar abstraction shared by the closed-form parts of the crate.
//!
//! Everything that is pure algebra over physical constants (kernels, the
//! parameter solver, the semi-classical inequalities) is written against
//! [`Real`]. The Monte Carlo and lattice dynamics work in `f64` directly.
//!
//! Note that CGS magnitudes such as ħ² (~1e-54) underflow `f32`, so the `f32`
//! instantiation is only useful in rescaled (natural) units.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar usable by the closed-form formulas.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// The error function.
    fn erf(self) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn erf(self) -> Self {
        libm::erf(self)
    }
}

impl Real for f32 {
    #[inline]
    fn erf(self) -> Self {
        libm::erff(self)
    }
}

/// `x^(3/2)` without going through `powf`.
#[inline]
pub(crate) fn pow3_2<T: Real>(x: T) -> T {
    x * x.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_matches_reference_points() {
        // erf(1) and erf(0.5) to 15 digits
        assert!((Real::erf(1.0f64) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((Real::erf(0.5f64) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((Real::erf(1.0f32) - 0.842_700_8).abs() < 1e-6);
    }

    #[test]
    fn pow3_2_is_consistent() {
        assert!((pow3_2(4.0f64) - 8.0).abs() < 1e-14);
    }
}
