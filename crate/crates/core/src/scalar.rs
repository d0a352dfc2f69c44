//! Numeric abstractions shared by the fraction arithmetic and the exact engine.
//!
//! [`Integral`] is the ring used for continued-fraction numerators and
//! denominators (`i64` for short words, [`BigInt`] everywhere else).
//! [`Scalar`] is the weaker bound used by the x-table recursions: any signed
//! number type works, including `f64` and exact rationals, but only
//! [`BigInt`] is exact for every `n`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Integral: Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + ToBigInt {}

impl<T> Integral for T where
    T: Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + ToBigInt
{
}

pub trait Scalar: Num + Signed + Clone + Debug + FromPrimitive {}

impl<T> Scalar for T where T: Num + Signed + Clone + Debug + FromPrimitive {}

/// Converts an integral value into a [`BigInt`].
pub fn to_big<T: Integral>(value: &T) -> BigInt {
    value.to_bigint().expect("integral types convert to BigInt")
}

pub(crate) fn from_usize<T: Scalar>(v: usize) -> T {
    T::from_usize(v).expect("scalar type cannot represent a small count")
}

/// Pascal's triangle, grown lazily. Additions only, so any [`Scalar`] works.
#[derive(Debug, Clone)]
pub struct Pascal<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Default for Pascal<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Pascal<T> {
    pub fn new() -> Self {
        Self {
            rows: vec![vec![T::one()]],
        }
    }

    fn grow_to(&mut self, n: usize) {
        while self.rows.len() <= n {
            let prev = self.rows.last().expect("row 0 always present");
            let mut row = Vec::with_capacity(prev.len() + 1);
            row.push(T::one());
            for pair in prev.windows(2) {
                row.push(pair[0].clone() + pair[1].clone());
            }
            row.push(T::one());
            self.rows.push(row);
        }
    }

    /// `C(n, k)` with `C(n, k) = 0` for `k < 0` or `k > n`.
    ///
    /// Panics on `n < 0`; the recursions never ask for negative upper indices.
    pub fn binom(&mut self, n: i64, k: i64) -> T {
        assert!(n >= 0, "binomial with negative upper index {n}");
        if k < 0 || k > n {
            return T::zero();
        }
        let n = n as usize;
        self.grow_to(n);
        self.rows[n][k as usize].clone()
    }
}
