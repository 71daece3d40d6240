//! Scalar abstractions.
//!
//! Two tiers are used throughout the crate:
//!
//! * [`Weight`] is an ordered field. Edge weights, matchings and the
//!   fractional-matching LP only need field arithmetic, so they also work over
//!   exact rationals ([`num_rational::Rational64`]).
//! * [`Real`] adds everything the numerical layers need (square roots,
//!   eigendecompositions, transcendental functions). Implemented for `f32` and
//!   `f64`.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_rational::Ratio;
use num_traits::{FloatConst, FromPrimitive, Num};

/// Ordered field used for edge weights and LP values.
pub trait Weight: Num + PartialOrd + Copy + Debug + Display + Send + Sync + 'static {
    /// `a >= b` up to the rounding slack of the type. Exact types compare exactly.
    fn approx_ge(self, other: Self) -> bool;

    fn is_finite_value(self) -> bool;

    fn as_f64(self) -> f64;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(self) -> Self {
        self / Self::two()
    }

    /// Exact conversion of a small integer.
    fn from_count(k: usize) -> Self {
        let mut acc = Self::zero();
        let mut bit = Self::one();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc + bit;
            }
            bit = bit + bit;
            k >>= 1;
        }
        acc
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

macro_rules! float_weight {
    ($t:ty, $slack:expr) => {
        impl Weight for $t {
            fn approx_ge(self, other: Self) -> bool {
                let scale = self.abs().max(other.abs()).max(1.0);
                self >= other - $slack * scale
            }

            fn is_finite_value(self) -> bool {
                self.is_finite()
            }

            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

float_weight!(f64, 1e-9);
float_weight!(f32, 1e-5);

macro_rules! ratio_weight {
    ($i:ty) => {
        impl Weight for Ratio<$i> {
            fn approx_ge(self, other: Self) -> bool {
                self >= other
            }

            fn is_finite_value(self) -> bool {
                true
            }

            fn as_f64(self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    };
}

ratio_weight!(i64);
ratio_weight!(i32);

/// Floating-point scalar for the numerical layers.
pub trait Real: Weight + RealField + Copy + FromPrimitive + FloatConst {
    /// Converts a literal. Panics only if the type cannot represent finite `f64`s.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar type cannot represent an f64 literal")
    }

    /// Machine epsilon.
    fn eps() -> Self {
        Self::default_epsilon()
    }
}

impl Real for f64 {}
impl Real for f32 {}
