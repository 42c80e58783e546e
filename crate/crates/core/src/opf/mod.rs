//! Order-preserving functions built bit by bit.
//!
//! Every construction here evaluates `F(x) = Σ_i f_i(x_i)`, where `f_i`
//! maps the `i`-th least significant bit of `x` to an integer:
//!
//! * [`GeneralOpf`]: arbitrary per-bit maps, valid when each position's gap
//!   `f_i(1) - f_i(0)` is positive and exceeds the sum of all lower gaps.
//!   Valid maps give a strictly increasing `F`.
//! * [`SharedParams`]: the parametric family `f_i(0) = s`,
//!   `f_i(1) = s + k^i·l`, which two parties can build from three shared
//!   constants and which needs no input-length bound.
//! * [`PointOpf`]: a random function that preserves order only relative to
//!   one anchor value `b`.

mod general;
mod point;
mod shared;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitcore::BitError;
use crate::prg::PrgError;
use crate::scalar::OpfScalar;

pub use general::{eval, validate_general, Constraint, GeneralOpf, Validation};
pub use point::{
    construct_at_point, construct_at_point_injected, eval_point, output_bounds, GapKind, PointOpf,
    PointOpfDocument, PositionGap,
};
pub use shared::{shared_eval, shared_output_bits, SharedParams, DEFAULT_COMPLEMENT_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpfError {
    #[error("input has {width} bits but the function covers {len}")]
    InputTooWide { width: usize, len: usize },
    #[error("arithmetic overflow in the chosen scalar type")]
    Overflow,
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("position {position}: empty sampling interval [{lo}, {hi}]")]
    EmptyInterval {
        position: usize,
        lo: String,
        hi: String,
    },
    #[error("position {position}: injected value {value} outside {interval}")]
    DrawOutOfRange {
        position: usize,
        value: String,
        interval: String,
    },
    #[error("expected {expected} injected draws, got {got}")]
    DrawCount { expected: usize, got: usize },
    #[error(transparent)]
    Bits(#[from] BitError),
    #[error(transparent)]
    Prg(#[from] PrgError),
}

/// The pair `(f_i(0), f_i(1))` for one bit position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerBitMap<V> {
    pub zero_val: V,
    pub one_val: V,
}

impl<V: OpfScalar> PerBitMap<V> {
    pub fn new(zero_val: V, one_val: V) -> Self {
        PerBitMap { zero_val, one_val }
    }

    pub fn get(&self, bit: bool) -> &V {
        if bit {
            &self.one_val
        } else {
            &self.zero_val
        }
    }

    /// `f_i(1) - f_i(0)`.
    pub fn gap(&self) -> Result<V, OpfError> {
        self.one_val
            .checked_sub(&self.zero_val)
            .ok_or(OpfError::Overflow)
    }

    pub fn min(&self) -> &V {
        std::cmp::min(&self.zero_val, &self.one_val)
    }

    pub fn max(&self) -> &V {
        std::cmp::max(&self.zero_val, &self.one_val)
    }
}

/// Sums `f_i(x_i)` over the first `maps.len()` positions, zero-padding `x`.
pub(crate) fn sum_maps<V: OpfScalar>(
    maps: &[PerBitMap<V>],
    x: &crate::bitcore::BitString,
) -> Result<V, OpfError> {
    let significant = x.to_minimal().width();
    if significant > maps.len() && !(significant == 1 && !x.bit(1)) {
        return Err(OpfError::InputTooWide {
            width: significant,
            len: maps.len(),
        });
    }
    maps.iter().enumerate().try_fold(V::zero(), |acc, (i, m)| {
        acc.checked_add(m.get(x.bit(i + 1)))
            .ok_or(OpfError::Overflow)
    })
}

/// JSON number when it fits in `i64`, decimal string otherwise.
pub(crate) fn json_int<V: OpfScalar>(v: &V) -> serde_json::Value {
    use num_traits::ToPrimitive;
    match v.to_bigint().to_i64() {
        Some(n) => serde_json::Value::from(n),
        None => serde_json::Value::from(v.to_string()),
    }
}

pub(crate) fn int_from_json<V: OpfScalar>(v: &serde_json::Value) -> Option<V> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().and_then(V::from_i64),
        serde_json::Value::String(s) => s
            .parse::<num_bigint::BigInt>()
            .ok()
            .and_then(|b| V::from_bigint(&b)),
        _ => None,
    }
}
