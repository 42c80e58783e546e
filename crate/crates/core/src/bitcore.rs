//! Bit strings in the LSB-first convention used by all three protocols.
//!
//! Position 1 is the least significant bit. Strings render MSB-first
//! (`"1001"` is nine) so transcripts and tables read like ordinary binary.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitError {
    #[error("value needs {needed} bits but width is {width}")]
    WidthTooSmall { needed: usize, width: usize },
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("value {value} is outside the {width}-bit two's complement range")]
    OutOfRange { value: BigInt, width: usize },
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("invalid bit character {0:?}")]
    InvalidChar(char),
    #[error("empty bit string")]
    Empty,
}

/// A non-empty sequence of bits, least significant first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    /// Builds from LSB-first bits.
    pub fn from_lsb_bits(bits: Vec<bool>) -> Result<Self, BitError> {
        if bits.is_empty() {
            return Err(BitError::Empty);
        }
        Ok(Self { bits })
    }

    pub fn zeros(width: usize) -> Result<Self, BitError> {
        if width == 0 {
            return Err(BitError::ZeroWidth);
        }
        Ok(Self {
            bits: vec![false; width],
        })
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// Bit at 1-based position `i` (1 = LSB). Positions past the width read as 0.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i >= 1, "bit positions start at 1");
        self.bits.get(i - 1).copied().unwrap_or(false)
    }

    /// LSB-first view of the bits.
    pub fn lsb_bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_minimal(&self) -> bool {
        self.bits.len() == 1 || *self.bits.last().unwrap()
    }

    /// Drops leading zeros, keeping at least one bit.
    pub fn to_minimal(&self) -> BitString {
        let top = self.bits.iter().rposition(|&b| b).map_or(1, |p| p + 1);
        BitString {
            bits: self.bits[..top].to_vec(),
        }
    }

    /// Zero-extends to `width` bits.
    pub fn padded(&self, width: usize) -> Result<BitString, BitError> {
        let needed = self.to_minimal().width();
        if width < needed || width == 0 {
            return Err(BitError::WidthTooSmall { needed, width });
        }
        let mut bits = self.bits.clone();
        bits.resize(width, false);
        bits.truncate(width);
        Ok(BitString { bits })
    }
}

pub fn bit_length(value: &BigUint) -> usize {
    value.bits() as usize
}

/// Binary expansion of `value`. `None` gives minimal form (no leading zeros).
pub fn to_bits(value: &BigUint, width: Option<usize>) -> Result<BitString, BitError> {
    let needed = bit_length(value).max(1);
    let width = match width {
        Some(0) => return Err(BitError::ZeroWidth),
        Some(w) if w < bit_length(value) => {
            return Err(BitError::WidthTooSmall {
                needed: bit_length(value),
                width: w,
            })
        }
        Some(w) => w,
        None => needed,
    };
    let bits = (0..width as u64).map(|i| value.bit(i)).collect();
    Ok(BitString { bits })
}

/// Shorthand for small inputs.
pub fn to_bits_u64(value: u64, width: Option<usize>) -> Result<BitString, BitError> {
    to_bits(&BigUint::from(value), width)
}

pub fn from_bits(x: &BitString) -> BigUint {
    let mut out = BigUint::zero();
    for (i, &b) in x.bits.iter().enumerate() {
        if b {
            out.set_bit(i as u64, true);
        }
    }
    out
}

/// Value of a bit string as `u64`; panics past 64 significant bits.
pub fn from_bits_u64(x: &BitString) -> u64 {
    let v = from_bits(x);
    u64::try_from(&v).expect("bit string wider than 64 significant bits")
}

pub fn twos_complement_encode(value: &BigInt, width: usize) -> Result<BitString, BitError> {
    if width == 0 {
        return Err(BitError::ZeroWidth);
    }
    let half = BigInt::one() << (width - 1);
    if *value >= half || *value < -half.clone() {
        return Err(BitError::OutOfRange {
            value: value.clone(),
            width,
        });
    }
    let modulus = BigInt::one() << width;
    let word = if value.sign() == Sign::Minus {
        value + &modulus
    } else {
        value.clone()
    };
    to_bits(&word.to_biguint().expect("non-negative"), Some(width))
}

/// Inverse of [`twos_complement_encode`] at the string's own width.
pub fn twos_complement_decode(x: &BitString) -> BigInt {
    let v = BigInt::from(from_bits(x));
    if msb(x) {
        v - (BigInt::one() << x.width())
    } else {
        v
    }
}

pub fn msb(x: &BitString) -> bool {
    x.bit(x.width())
}

/// Bitwise complement after zero-padding `x` to `width`.
pub fn complement(x: &BitString, width: usize) -> Result<BitString, BitError> {
    let padded = x.padded(width)?;
    Ok(BitString {
        bits: padded.bits.iter().map(|b| !b).collect(),
    })
}

pub fn xor(x: &BitString, y: &BitString) -> Result<BitString, BitError> {
    if x.width() != y.width() {
        return Err(BitError::WidthMismatch {
            left: x.width(),
            right: y.width(),
        });
    }
    Ok(BitString {
        bits: x.bits.iter().zip(&y.bits).map(|(a, b)| a ^ b).collect(),
    })
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Parses MSB-first `'0'`/`'1'` text, keeping the written width.
impl FromStr for BitString {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars().rev() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(BitError::InvalidChar(other)),
            }
        }
        BitString::from_lsb_bits(bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
