//! The floating point scalar every geometric quantity is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Panics only for NaN-producing overflow, which
    /// cannot happen for the two implementors.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Exact integer power of two.
    #[inline]
    fn pow2(e: i32) -> Self {
        Self::lit(2f64.powi(e))
    }

    /// A stated tolerance, floored at a few ulps of the scalar type.
    #[inline]
    fn tol(spec: f64) -> Self {
        Self::lit(spec).max(Self::epsilon() * Self::lit(16.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier compensated sum, used wherever a result must not depend on the
/// order partial results arrive in beyond the last few ulps.
pub fn compensated_sum<S: Scalar, I: IntoIterator<Item = S>>(values: I) -> S {
    let mut sum = S::zero();
    let mut c = S::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c = c + ((sum - t) + v);
        } else {
            c = c + ((v - t) + sum);
        }
        sum = t;
    }
    sum + c
}

/// Total-order key of a scalar, used to sort and merge geometry exactly.
#[inline]
pub(crate) fn order_key<S: Scalar>(x: S) -> u64 {
    let f = x.as_f64();
    // +0.0 and -0.0 are the same coordinate.
    let f = if f == 0.0 { 0.0 } else { f };
    let bits = f.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn order_key_is_monotone() {
        let xs = [-3.5f64, -1.0, -0.0, 0.0, 1e-300, 2.0, 7.25];
        for w in xs.windows(2) {
            assert!(order_key(w[0]) <= order_key(w[1]));
        }
        assert_eq!(order_key(-0.0f64), order_key(0.0f64));
    }
}
