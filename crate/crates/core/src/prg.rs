//! SHA-256 counter-mode generator and the two-level seed schedule used to
//! derive every random value of a point-OPF from one seed.
//!
//! Block `j` of the keystream for seed `S` is `SHA-256(S || be64(j))`.
//! [`expand`] cuts the first `2·d·c` bits of that stream into `2d` subseeds
//! of `c` bits each; [`int_in_range`] reads a fresh stream from a subseed and
//! rejection-samples a uniform integer.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand_core::{impls, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DEFAULT_SEED_BYTES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrgError {
    #[error("empty sampling interval [{lo}, {hi}] (exclusive: {exclusive})")]
    EmptyInterval {
        lo: BigInt,
        hi: BigInt,
        exclusive: bool,
    },
    #[error("invalid seed hex: {0}")]
    BadHex(String),
    #[error("seed must be at least one byte")]
    EmptySeed,
}

/// Opaque seed of `c = 8·len` bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(Vec<u8>);

impl Seed {
    pub fn new(bytes: Vec<u8>) -> Result<Self, PrgError> {
        if bytes.is_empty() {
            return Err(PrgError::EmptySeed);
        }
        Ok(Seed(bytes))
    }

    /// Default-width seed holding `v` big-endian in its low bytes.
    pub fn from_u64(v: u64) -> Self {
        let mut bytes = vec![0u8; DEFAULT_SEED_BYTES];
        bytes[DEFAULT_SEED_BYTES - 8..].copy_from_slice(&v.to_be_bytes());
        Seed(bytes)
    }

    pub fn from_hex(s: &str) -> Result<Self, PrgError> {
        let bytes = hex::decode(s).map_err(|e| PrgError::BadHex(e.to_string()))?;
        Seed::new(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Seed bit-length `c`.
    pub fn bits(&self) -> usize {
        self.0.len() * 8
    }

    /// Independent child seed of the same width for a named purpose.
    pub fn derive(&self, label: &str) -> Seed {
        let mut out = Vec::with_capacity(self.0.len());
        let mut block = 0u64;
        while out.len() < self.0.len() {
            let mut h = Sha256::new();
            h.update(b"derive");
            h.update((self.0.len() as u64).to_be_bytes());
            h.update(&self.0);
            h.update(label.as_bytes());
            h.update(block.to_be_bytes());
            out.extend_from_slice(&h.finalize());
            block += 1;
        }
        out.truncate(self.0.len());
        Seed(out)
    }

    pub fn derive_indexed(&self, label: &str, index: u64) -> Seed {
        self.derive(&format!("{label}/{index}"))
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({})", self.to_hex())
    }
}

impl FromStr for Seed {
    type Err = PrgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Seed::from_hex(s)
    }
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Seed::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// SHA-256 counter-mode byte stream.
#[derive(Clone)]
pub struct Keystream {
    seed: Vec<u8>,
    counter: u64,
    block: [u8; 32],
    used: usize,
}

impl std::fmt::Debug for Keystream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Keystream")
            .field("counter", &self.counter)
            .finish_non_exhaustive()
    }
}

impl Keystream {
    pub fn new(seed: &Seed) -> Self {
        Keystream {
            seed: seed.0.clone(),
            counter: 0,
            block: [0; 32],
            used: 32,
        }
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(&self.seed);
        h.update(self.counter.to_be_bytes());
        self.block.copy_from_slice(&h.finalize());
        self.counter += 1;
        self.used = 0;
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        for byte in out.iter_mut() {
            if self.used == self.block.len() {
                self.refill();
            }
            *byte = self.block[self.used];
            self.used += 1;
        }
    }

    pub fn take(&mut self, n: usize) -> Vec<u8> {
        let mut out = vec![0u8; n];
        self.fill(&mut out);
        out
    }

    pub fn next_bit(&mut self) -> bool {
        self.take(1)[0] & 1 == 1
    }

    /// Uniform integer in `[0, bound)` by rejection on masked big-endian draws.
    pub fn below(&mut self, bound: &BigUint) -> BigUint {
        assert!(!bound.is_zero(), "empty range");
        if bound.is_one() {
            return BigUint::zero();
        }
        let bits = (bound - 1u32).bits() as usize;
        let nbytes = bits.div_ceil(8);
        let excess = nbytes * 8 - bits;
        loop {
            let mut buf = self.take(nbytes);
            buf[0] &= 0xff >> excess;
            let candidate = BigUint::from_bytes_be(&buf);
            if &candidate < bound {
                return candidate;
            }
        }
    }

    /// Uniform `w`-bit word.
    pub fn bits(&mut self, w: usize) -> BigUint {
        self.below(&(BigUint::one() << w))
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn in_range(&mut self, lo: &BigInt, hi: &BigInt) -> Result<BigInt, PrgError> {
        if hi < lo {
            return Err(PrgError::EmptyInterval {
                lo: lo.clone(),
                hi: hi.clone(),
                exclusive: false,
            });
        }
        let span = (hi - lo + 1u32).to_biguint().expect("positive span");
        Ok(lo + BigInt::from(self.below(&span)))
    }
}

impl RngCore for Keystream {
    fn next_u32(&mut self) -> u32 {
        impls::next_u32_via_fill(self)
    }

    fn next_u64(&mut self) -> u64 {
        impls::next_u64_via_fill(self)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.fill(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.fill(dest);
        Ok(())
    }
}

/// The `2d` subseeds cut from one expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubseedSchedule {
    subseeds: Vec<Seed>,
    d: usize,
}

impl SubseedSchedule {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn subseeds(&self) -> &[Seed] {
        &self.subseeds
    }

    /// Subseed for the value anchored at bit position `i` (1-based).
    pub fn anchor(&self, i: usize) -> &Seed {
        &self.subseeds[2 * (i - 1)]
    }

    /// Subseed for the complementary value at bit position `i` (1-based).
    pub fn partner(&self, i: usize) -> &Seed {
        &self.subseeds[2 * (i - 1) + 1]
    }
}

pub fn expand(seed: &Seed, d: usize) -> SubseedSchedule {
    assert!(d >= 1, "expand needs d >= 1");
    let c = seed.0.len();
    let mut stream = Keystream::new(seed);
    let subseeds = (0..2 * d).map(|_| Seed(stream.take(c))).collect();
    SubseedSchedule { subseeds, d }
}

pub fn int_in_range(
    subseed: &Seed,
    lo: &BigInt,
    hi: &BigInt,
    exclusive: bool,
) -> Result<BigInt, PrgError> {
    let (a, b) = if exclusive {
        (lo + 1, hi - 1)
    } else {
        (lo.clone(), hi.clone())
    };
    if b < a {
        return Err(PrgError::EmptyInterval {
            lo: lo.clone(),
            hi: hi.clone(),
            exclusive,
        });
    }
    Keystream::new(subseed).in_range(&a, &b)
}
