//! Floating-point scalar abstraction for the simulation core.
//!
//! Statevectors, probability distributions and the FFT backend are generic
//! over the scalar so the whole simulation stack can run in `f32` or `f64`.
//! Integer-side code (number theory, registers, histograms) is not generic;
//! it works on arbitrary-precision or machine integers regardless of scalar.

use rand::distr::uniform::SampleUniform;
use rand::distr::weighted::Weight;

/// Scalar type usable as the amplitude component of a statevector.
///
/// Bundles everything the simulator needs: float arithmetic and constants,
/// FFT support, and weighted sampling. Implemented for `f32` and `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::NumAssign
    + rustfft::FftNum
    + SampleUniform
    + Weight
    + std::iter::Sum
    + std::fmt::Display
    + Default
    + PartialOrd
{
    /// Shorthand for lossy conversion from `f64` (gate angles are stored as
    /// `f64` in the circuit IR and narrowed on application).
    fn from_f64_lossy(x: f64) -> Self;
}

impl Scalar for f32 {
    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm_of_unit<T: Scalar>() -> T {
        let re = T::one();
        let im = T::zero();
        (re * re + im * im).sqrt()
    }

    #[test]
    fn both_scalars_do_float_arithmetic() {
        assert_eq!(norm_of_unit::<f32>(), 1.0f32);
        assert_eq!(norm_of_unit::<f64>(), 1.0f64);
    }

    #[test]
    fn lossy_conversion_roundtrips_small_values() {
        assert_eq!(f32::from_f64_lossy(0.5), 0.5f32);
        assert_eq!(f64::from_f64_lossy(0.5), 0.5f64);
    }
}
