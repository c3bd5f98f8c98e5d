//! Exact coefficient types.
//!
//! Every polynomial, series and matrix in the crate is generic over a
//! [`Coefficient`]. Two implementations ship: arbitrary-precision integers
//! (the group-ring case) and arbitrary-precision rationals (needed while an
//! exponential series has not yet been shown integral).

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

/// An exact commutative coefficient ring with a notion of exact division.
pub trait Coefficient:
    Clone
    + Debug
    + Display
    + Eq
    + Zero
    + One
    + Signed
    + FromPrimitive
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `Some(q)` with `q * rhs == self`, or `None` when no such `q` exists.
    fn exact_div(&self, rhs: &Self) -> Option<Self>;

    /// Non-negative greatest common divisor; `gcd(0, 0) == 0`.
    fn gcd(&self, other: &Self) -> Self;

    /// `Some(n)` when the value is an integer.
    fn to_integer(&self) -> Option<BigInt>;

    fn from_integer(n: BigInt) -> Self;
}

impl Coefficient for BigInt {
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        r.is_zero().then_some(q)
    }

    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }

    fn to_integer(&self) -> Option<BigInt> {
        Some(self.clone())
    }

    fn from_integer(n: BigInt) -> Self {
        n
    }
}

impl Coefficient for BigRational {
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    // gcd(a/b, c/d) = gcd(a, c) / lcm(b, d)
    fn gcd(&self, other: &Self) -> Self {
        let num = Integer::gcd(self.numer(), other.numer());
        let den = Integer::lcm(self.denom(), other.denom());
        BigRational::new(num, den)
    }

    fn to_integer(&self) -> Option<BigInt> {
        // ratios are kept reduced, so an integer has denominator one
        self.is_integer().then(|| self.numer().clone())
    }

    fn from_integer(n: BigInt) -> Self {
        BigRational::from_integer(n)
    }
}
