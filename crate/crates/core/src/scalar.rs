//! Integer types the order-preserving constructions can run over.
//!
//! Machine words are fast for small exhaustive checks; `BigInt` is what the
//! protocols use, since shared-family values grow like `k^n`. Arithmetic
//! goes through the checked traits so fixed-width scalars report overflow
//! instead of wrapping.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

pub trait OpfScalar:
    Clone
    + Ord
    + Debug
    + Display
    + Zero
    + One
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
    /// `None` when `v` does not fit.
    fn from_bigint(v: &BigInt) -> Option<Self>;

    fn to_bigint(&self) -> BigInt;

    fn from_i64(v: i64) -> Option<Self> {
        Self::from_bigint(&BigInt::from(v))
    }
}

impl OpfScalar for i64 {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }

    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl OpfScalar for i128 {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }

    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl OpfScalar for BigInt {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }

    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}
