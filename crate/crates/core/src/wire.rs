//! Byte encodings for message payloads.
//!
//! Integers travel as a big-endian `u16` length followed by big-endian
//! magnitude bytes (unsigned) or two's complement bytes (signed).

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("payload truncated while reading {0}")]
    Truncated(&'static str),
    #[error("{0} trailing bytes in payload")]
    Trailing(usize),
    #[error("field too long to encode ({0} bytes)")]
    TooLong(usize),
}

#[derive(Debug, Default, Clone)]
pub struct Writer(Vec<u8>);

impl Writer {
    pub fn new() -> Self {
        Writer(Vec::new())
    }

    pub fn u8(mut self, v: u8) -> Self {
        self.0.push(v);
        self
    }

    pub fn u16(mut self, v: u16) -> Self {
        self.0.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn bytes(mut self, b: &[u8]) -> Self {
        self.0.extend_from_slice(b);
        self
    }

    /// Length-prefixed opaque bytes.
    pub fn blob(self, b: &[u8]) -> Self {
        let len =
            u16::try_from(b.len()).unwrap_or_else(|_| panic!("{}", WireError::TooLong(b.len())));
        self.u16(len).bytes(b)
    }

    pub fn uint(self, v: &BigUint) -> Self {
        self.blob(&v.to_bytes_be())
    }

    pub fn int(self, v: &BigInt) -> Self {
        self.blob(&v.to_signed_bytes_be())
    }

    /// Fixed-width little-endian word of `ceil(width/8)` bytes.
    pub fn word(self, v: &BigUint, width: usize) -> Self {
        let mut b = v.to_bytes_le();
        b.resize(width.div_ceil(8), 0);
        self.bytes(&b)
    }

    pub fn finish(self) -> Vec<u8> {
        self.0
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], WireError> {
        if self.buf.len() < n {
            return Err(WireError::Truncated(what));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self, what: &'static str) -> Result<u8, WireError> {
        Ok(self.take(1, what)?[0])
    }

    pub fn u16(&mut self, what: &'static str) -> Result<u16, WireError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn blob(&mut self, what: &'static str) -> Result<&'a [u8], WireError> {
        let len = self.u16(what)? as usize;
        self.take(len, what)
    }

    pub fn uint(&mut self, what: &'static str) -> Result<BigUint, WireError> {
        Ok(BigUint::from_bytes_be(self.blob(what)?))
    }

    pub fn int(&mut self, what: &'static str) -> Result<BigInt, WireError> {
        Ok(BigInt::from_signed_bytes_be(self.blob(what)?))
    }

    pub fn word(&mut self, width: usize, what: &'static str) -> Result<BigUint, WireError> {
        Ok(BigUint::from_bytes_le(self.take(width.div_ceil(8), what)?))
    }

    pub fn finish(self) -> Result<(), WireError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(WireError::Trailing(self.buf.len()))
        }
    }
}

/// A payload holding exactly one signed integer.
pub fn encode_int(v: &BigInt) -> Vec<u8> {
    Writer::new().int(v).finish()
}

pub fn decode_int(payload: &[u8]) -> Result<BigInt, WireError> {
    let mut r = Reader::new(payload);
    let v = r.int("integer")?;
    r.finish()?;
    Ok(v)
}
