//! Scalar traits shared by the matrix code.
//!
//! Matrices are generic over any type implementing [`Ring`]; elimination
//! needs [`Field`]. Implementations are provided for exact rationals,
//! cyclotomic numbers, big integers (ring only) and `f32`/`f64`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A commutative ring with identity.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Complex conjugate; identity on real scalars.
    fn conj(&self) -> Self {
        self.clone()
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn try_inv(&self) -> Option<Self>;

    /// Pivot preference during elimination. `None` means "treat as zero".
    ///
    /// Exact fields return a constant for every nonzero element, which makes
    /// elimination pick the first nonzero entry; floating types return the
    /// magnitude (partial pivoting) and `None` below a tolerance.
    fn pivot_weight(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(1.0)
        }
    }
}

impl Ring for BigInt {}

impl Ring for BigRational {}

impl Field for BigRational {
    fn try_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

macro_rules! float_field {
    ($t:ty, $tol:expr) => {
        impl Ring for $t {}

        impl Field for $t {
            fn try_inv(&self) -> Option<Self> {
                (self.abs() > $tol).then(|| 1.0 / self)
            }

            fn pivot_weight(&self) -> Option<f64> {
                let w = self.abs() as f64;
                (w > $tol).then_some(w)
            }
        }
    };
}

float_field!(f64, 1e-10);
float_field!(f32, 1e-5);

/// Convenience: a rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one()
}

pub fn is_nonneg(q: &BigRational) -> bool {
    !q.is_negative()
}
