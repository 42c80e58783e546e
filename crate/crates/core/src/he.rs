//! Partially homomorphic encryption with `w`-bit words: subtraction modulo
//! `2^w` and bitwise XOR over ciphertexts.
//!
//! [`Transparent`] is a functional reference backend. A ciphertext is the
//! plaintext XOR a keystream tag derived from the public key id and a
//! per-ciphertext nonce, so homomorphic evaluation is exact. Decryption
//! checks the private key against the ciphertext's key id. It offers no
//! semantic security: anyone holding the public part can strip the tag.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bitcore::{from_bits, to_bits, BitString};
use crate::prg::{Keystream, Seed};
use crate::simnet::{OpCounters, OpTag};

pub const MIN_WIDTH: usize = 2;
pub const MAX_WIDTH: usize = 255;

const KEY_ID_LEN: usize = 8;
const NONCE_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeError {
    #[error("word width {0} outside [{MIN_WIDTH}, {MAX_WIDTH}]")]
    BadWidth(usize),
    #[error("plaintext width {got} does not match key width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("ciphertext was produced under a different key")]
    KeyMismatch,
    #[error("malformed {0}")]
    Malformed(&'static str),
    #[error("unknown backend {0:?}")]
    UnknownBackend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeBackend {
    #[default]
    Transparent,
}

impl std::str::FromStr for HeBackend {
    type Err = HeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "transparent" => Ok(HeBackend::Transparent),
            other => Err(HeError::UnknownBackend(other.to_string())),
        }
    }
}

impl fmt::Display for HeBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("transparent")
    }
}

#[derive(Debug, Clone)]
pub struct SchemeKeys<P, S> {
    pub public_part: P,
    pub private_part: S,
    pub width: usize,
}

/// A scheme with additive and XOR homomorphisms over `w`-bit words.
///
/// Every operation bumps its counter in `ops`.
pub trait HomomorphicScheme {
    type PublicKey: Clone + fmt::Debug;
    type PrivateKey: fmt::Debug;
    type Ciphertext: Clone + fmt::Debug;

    fn keygen(
        &self,
        width: usize,
        seed: &Seed,
    ) -> Result<SchemeKeys<Self::PublicKey, Self::PrivateKey>, HeError>;

    fn width(&self, pk: &Self::PublicKey) -> usize;

    fn enc(
        &self,
        pk: &Self::PublicKey,
        m: &BitString,
        rng: &mut Keystream,
        ops: &mut OpCounters,
    ) -> Result<Self::Ciphertext, HeError>;

    fn dec(
        &self,
        sk: &Self::PrivateKey,
        c: &Self::Ciphertext,
        ops: &mut OpCounters,
    ) -> Result<BitString, HeError>;

    /// Decrypts to `(x - y) mod 2^w`.
    fn hom_sub(
        &self,
        pk: &Self::PublicKey,
        x: &Self::Ciphertext,
        y: &Self::Ciphertext,
        ops: &mut OpCounters,
    ) -> Result<Self::Ciphertext, HeError>;

    fn hom_xor(
        &self,
        pk: &Self::PublicKey,
        x: &Self::Ciphertext,
        y: &Self::Ciphertext,
        ops: &mut OpCounters,
    ) -> Result<Self::Ciphertext, HeError>;

    /// XOR with a plaintext operand; counts as one `hom_xor` and no `enc`.
    fn hom_xor_plain(
        &self,
        pk: &Self::PublicKey,
        x: &Self::Ciphertext,
        r: &BitString,
        ops: &mut OpCounters,
    ) -> Result<Self::Ciphertext, HeError>;

    fn encode_public(&self, pk: &Self::PublicKey) -> Vec<u8>;
    fn decode_public(&self, bytes: &[u8]) -> Result<Self::PublicKey, HeError>;
    fn encode_ciphertext(&self, c: &Self::Ciphertext) -> Vec<u8>;
    fn decode_ciphertext(&self, bytes: &[u8]) -> Result<Self::Ciphertext, HeError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Transparent;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransparentPublic {
    key_id: [u8; KEY_ID_LEN],
    width: usize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct TransparentPrivate {
    secret: [u8; 32],
    width: usize,
}

impl fmt::Debug for TransparentPrivate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransparentPrivate")
            .field("width", &self.width)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransparentCiphertext {
    width: usize,
    key_id: [u8; KEY_ID_LEN],
    nonce: [u8; NONCE_LEN],
    masked: BigUint,
}

impl TransparentCiphertext {
    pub fn width(&self) -> usize {
        self.width
    }
}

fn key_id_of(secret: &[u8; 32]) -> [u8; KEY_ID_LEN] {
    let digest = Sha256::new()
        .chain_update(b"he-public")
        .chain_update(secret)
        .finalize();
    digest[..KEY_ID_LEN].try_into().unwrap()
}

fn tag(key_id: &[u8; KEY_ID_LEN], nonce: &[u8; NONCE_LEN], width: usize) -> BigUint {
    let mut seed = key_id.to_vec();
    seed.extend_from_slice(nonce);
    let seed = Seed::new(seed).expect("non-empty");
    Keystream::new(&seed).bits(width)
}

fn mask(width: usize) -> BigUint {
    (BigUint::one() << width) - 1u32
}

impl Transparent {
    fn check_pair(
        &self,
        pk: &TransparentPublic,
        x: &TransparentCiphertext,
        y: &TransparentCiphertext,
    ) -> Result<(), HeError> {
        for c in [x, y] {
            if c.key_id != pk.key_id {
                return Err(HeError::KeyMismatch);
            }
            if c.width != pk.width {
                return Err(HeError::WidthMismatch {
                    expected: pk.width,
                    got: c.width,
                });
            }
        }
        Ok(())
    }

    fn open(&self, c: &TransparentCiphertext) -> BigUint {
        &c.masked ^ tag(&c.key_id, &c.nonce, c.width)
    }

    fn seal(
        &self,
        pk: &TransparentPublic,
        nonce: [u8; NONCE_LEN],
        word: BigUint,
    ) -> TransparentCiphertext {
        let masked = (word & mask(pk.width)) ^ tag(&pk.key_id, &nonce, pk.width);
        TransparentCiphertext {
            width: pk.width,
            key_id: pk.key_id,
            nonce,
            masked,
        }
    }

    fn derived_nonce(op: &[u8], x: &[u8; NONCE_LEN], y: &[u8]) -> [u8; NONCE_LEN] {
        let digest = Sha256::new()
            .chain_update(op)
            .chain_update(x)
            .chain_update(y)
            .finalize();
        digest[..NONCE_LEN].try_into().unwrap()
    }
}

impl HomomorphicScheme for Transparent {
    type PublicKey = TransparentPublic;
    type PrivateKey = TransparentPrivate;
    type Ciphertext = TransparentCiphertext;

    fn keygen(
        &self,
        width: usize,
        seed: &Seed,
    ) -> Result<SchemeKeys<TransparentPublic, TransparentPrivate>, HeError> {
        if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
            return Err(HeError::BadWidth(width));
        }
        let mut secret = [0u8; 32];
        Keystream::new(&seed.derive("he-keygen")).fill(&mut secret);
        Ok(SchemeKeys {
            public_part: TransparentPublic {
                key_id: key_id_of(&secret),
                width,
            },
            private_part: TransparentPrivate { secret, width },
            width,
        })
    }

    fn width(&self, pk: &TransparentPublic) -> usize {
        pk.width
    }

    fn enc(
        &self,
        pk: &TransparentPublic,
        m: &BitString,
        rng: &mut Keystream,
        ops: &mut OpCounters,
    ) -> Result<TransparentCiphertext, HeError> {
        if m.width() != pk.width {
            return Err(HeError::WidthMismatch {
                expected: pk.width,
                got: m.width(),
            });
        }
        let mut nonce = [0u8; NONCE_LEN];
        rng.fill(&mut nonce);
        ops.bump(OpTag::Enc);
        Ok(self.seal(pk, nonce, from_bits(m)))
    }

    fn dec(
        &self,
        sk: &TransparentPrivate,
        c: &TransparentCiphertext,
        ops: &mut OpCounters,
    ) -> Result<BitString, HeError> {
        if key_id_of(&sk.secret) != c.key_id {
            return Err(HeError::KeyMismatch);
        }
        if c.width != sk.width {
            return Err(HeError::WidthMismatch {
                expected: sk.width,
                got: c.width,
            });
        }
        ops.bump(OpTag::Dec);
        Ok(to_bits(&self.open(c), Some(c.width)).expect("word fits its width"))
    }

    fn hom_sub(
        &self,
        pk: &TransparentPublic,
        x: &TransparentCiphertext,
        y: &TransparentCiphertext,
        ops: &mut OpCounters,
    ) -> Result<TransparentCiphertext, HeError> {
        self.check_pair(pk, x, y)?;
        let modulus = BigInt::one() << pk.width;
        let diff = (BigInt::from(self.open(x)) - BigInt::from(self.open(y)) + &modulus) % &modulus;
        ops.bump(OpTag::HomSub);
        let nonce = Self::derived_nonce(b"sub", &x.nonce, &y.nonce);
        Ok(self.seal(pk, nonce, diff.to_biguint().expect("reduced")))
    }

    fn hom_xor(
        &self,
        pk: &TransparentPublic,
        x: &TransparentCiphertext,
        y: &TransparentCiphertext,
        ops: &mut OpCounters,
    ) -> Result<TransparentCiphertext, HeError> {
        self.check_pair(pk, x, y)?;
        ops.bump(OpTag::HomXor);
        let nonce = Self::derived_nonce(b"xor", &x.nonce, &y.nonce);
        Ok(self.seal(pk, nonce, self.open(x) ^ self.open(y)))
    }

    fn hom_xor_plain(
        &self,
        pk: &TransparentPublic,
        x: &TransparentCiphertext,
        r: &BitString,
        ops: &mut OpCounters,
    ) -> Result<TransparentCiphertext, HeError> {
        self.check_pair(pk, x, x)?;
        if r.width() != pk.width {
            return Err(HeError::WidthMismatch {
                expected: pk.width,
                got: r.width(),
            });
        }
        ops.bump(OpTag::HomXor);
        let r_word = from_bits(r);
        let nonce = Self::derived_nonce(b"xor-plain", &x.nonce, &r_word.to_bytes_le());
        Ok(self.seal(pk, nonce, self.open(x) ^ r_word))
    }

    fn encode_public(&self, pk: &TransparentPublic) -> Vec<u8> {
        let mut out = vec![pk.width as u8];
        out.extend_from_slice(&pk.key_id);
        out
    }

    fn decode_public(&self, bytes: &[u8]) -> Result<TransparentPublic, HeError> {
        if bytes.len() != 1 + KEY_ID_LEN {
            return Err(HeError::Malformed("public key"));
        }
        let width = bytes[0] as usize;
        if width < MIN_WIDTH {
            return Err(HeError::BadWidth(width));
        }
        Ok(TransparentPublic {
            width,
            key_id: bytes[1..].try_into().unwrap(),
        })
    }

    /// Width byte, key id, nonce, then the masked word little-endian.
    fn encode_ciphertext(&self, c: &TransparentCiphertext) -> Vec<u8> {
        let word_len = c.width.div_ceil(8);
        let mut out = Vec::with_capacity(1 + KEY_ID_LEN + NONCE_LEN + word_len);
        out.push(c.width as u8);
        out.extend_from_slice(&c.key_id);
        out.extend_from_slice(&c.nonce);
        let mut word = c.masked.to_bytes_le();
        word.resize(word_len, 0);
        out.extend_from_slice(&word);
        out
    }

    fn decode_ciphertext(&self, bytes: &[u8]) -> Result<TransparentCiphertext, HeError> {
        let Some((&w, rest)) = bytes.split_first() else {
            return Err(HeError::Malformed("ciphertext"));
        };
        let width = w as usize;
        if width < MIN_WIDTH || rest.len() != KEY_ID_LEN + NONCE_LEN + width.div_ceil(8) {
            return Err(HeError::Malformed("ciphertext"));
        }
        let masked = BigUint::from_bytes_le(&rest[KEY_ID_LEN + NONCE_LEN..]);
        if masked > mask(width) {
            return Err(HeError::Malformed("ciphertext word"));
        }
        Ok(TransparentCiphertext {
            width,
            key_id: rest[..KEY_ID_LEN].try_into().unwrap(),
            nonce: rest[KEY_ID_LEN..KEY_ID_LEN + NONCE_LEN].try_into().unwrap(),
            masked,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{from_bits_u64, to_bits_u64, twos_complement_encode};

    fn setup(
        w: usize,
    ) -> (
        Transparent,
        SchemeKeys<TransparentPublic, TransparentPrivate>,
        Keystream,
    ) {
        let s = Transparent;
        let keys = s.keygen(w, &Seed::from_u64(11)).unwrap();
        (s, keys, Keystream::new(&Seed::from_u64(12)))
    }

    fn word(v: u64, w: usize) -> BitString {
        to_bits_u64(v, Some(w)).unwrap()
    }

    #[test]
    fn keygen_is_deterministic_and_seed_sensitive() {
        let s = Transparent;
        let a = s.keygen(8, &Seed::from_u64(1)).unwrap();
        let b = s.keygen(8, &Seed::from_u64(1)).unwrap();
        let c = s.keygen(8, &Seed::from_u64(2)).unwrap();
        assert_eq!(
            s.encode_public(&a.public_part),
            s.encode_public(&b.public_part)
        );
        assert_eq!(a.private_part, b.private_part);
        assert_ne!(
            s.encode_public(&a.public_part),
            s.encode_public(&c.public_part)
        );
        assert_eq!(
            s.keygen(1, &Seed::from_u64(1)).unwrap_err(),
            HeError::BadWidth(1)
        );
        assert!(s.keygen(256, &Seed::from_u64(1)).is_err());
    }

    #[test]
    fn round_trip_and_randomized() {
        let (s, k, mut rng) = setup(8);
        let mut ops = OpCounters::default();
        let m: BitString = "00000010".parse().unwrap();
        let c1 = s.enc(&k.public_part, &m, &mut rng, &mut ops).unwrap();
        let c2 = s.enc(&k.public_part, &m, &mut rng, &mut ops).unwrap();
        assert_ne!(c1, c2);
        assert_eq!(s.dec(&k.private_part, &c1, &mut ops).unwrap(), m);
        assert_eq!(s.dec(&k.private_part, &c2, &mut ops).unwrap(), m);
        assert_eq!(ops.get(OpTag::Enc), 2);
        assert_eq!(ops.get(OpTag::Dec), 2);
        assert_eq!(
            s.enc(&k.public_part, &word(3, 7), &mut rng, &mut ops),
            Err(HeError::WidthMismatch {
                expected: 8,
                got: 7
            })
        );
    }

    #[test]
    fn wrong_private_key_is_rejected() {
        let (s, k, mut rng) = setup(8);
        let other = s.keygen(8, &Seed::from_u64(99)).unwrap();
        let mut ops = OpCounters::default();
        let c = s
            .enc(&k.public_part, &word(5, 8), &mut rng, &mut ops)
            .unwrap();
        assert_eq!(
            s.dec(&other.private_part, &c, &mut ops),
            Err(HeError::KeyMismatch)
        );
        let foreign = s
            .enc(&other.public_part, &word(5, 8), &mut rng, &mut ops)
            .unwrap();
        assert_eq!(
            s.hom_sub(&k.public_part, &c, &foreign, &mut ops),
            Err(HeError::KeyMismatch)
        );
    }

    #[test]
    fn hom_sub_examples() {
        let (s, k, mut rng) = setup(8);
        let mut ops = OpCounters::default();
        let pk = &k.public_part;
        let e5 = s.enc(pk, &word(5, 8), &mut rng, &mut ops).unwrap();
        let e3 = s.enc(pk, &word(3, 8), &mut rng, &mut ops).unwrap();
        let d = |c| {
            s.dec(&k.private_part, &c, &mut OpCounters::default())
                .unwrap()
                .to_string()
        };
        assert_eq!(d(s.hom_sub(pk, &e5, &e3, &mut ops).unwrap()), "00000010");
        assert_eq!(d(s.hom_sub(pk, &e3, &e5, &mut ops).unwrap()), "11111110");
        assert_eq!(d(s.hom_sub(pk, &e5, &e5, &mut ops).unwrap()), "00000000");
        assert_eq!(ops.get(OpTag::HomSub), 3);
        let diff = s.hom_sub(pk, &e3, &e5, &mut ops).unwrap();
        assert_eq!(
            s.dec(&k.private_part, &diff, &mut ops).unwrap(),
            twos_complement_encode(&BigInt::from(-2), 8).unwrap()
        );
    }

    #[test]
    fn hom_xor_examples() {
        let (s, k, mut rng) = setup(8);
        let mut ops = OpCounters::default();
        let pk = &k.public_part;
        let x = s
            .enc(pk, &"11111110".parse().unwrap(), &mut rng, &mut ops)
            .unwrap();
        let y = s
            .enc(pk, &"10100101".parse().unwrap(), &mut rng, &mut ops)
            .unwrap();
        let z = s.enc(pk, &word(0, 8), &mut rng, &mut ops).unwrap();
        let d = |c| {
            s.dec(&k.private_part, &c, &mut OpCounters::default())
                .unwrap()
                .to_string()
        };
        assert_eq!(d(s.hom_xor(pk, &x, &y, &mut ops).unwrap()), "01011011");
        assert_eq!(d(s.hom_xor(pk, &x, &z, &mut ops).unwrap()), "11111110");
        assert_eq!(d(s.hom_xor(pk, &x, &x, &mut ops).unwrap()), "00000000");
        assert_eq!(
            d(
                s.hom_xor_plain(pk, &x, &"10100101".parse().unwrap(), &mut ops)
                    .unwrap()
            ),
            "01011011"
        );
        assert_eq!(ops.get(OpTag::HomXor), 4);
    }

    #[test]
    fn homomorphic_pipeline_exhaustive_w4() {
        let (s, k, mut rng) = setup(4);
        let pk = &k.public_part;
        let mut ops = OpCounters::default();
        for a in 0..16u64 {
            for b in 0..16u64 {
                let ea = s.enc(pk, &word(a, 4), &mut rng, &mut ops).unwrap();
                let eb = s.enc(pk, &word(b, 4), &mut rng, &mut ops).unwrap();
                let diff = s.hom_sub(pk, &ea, &eb, &mut ops).unwrap();
                for r in 0..16u64 {
                    let er = s.enc(pk, &word(r, 4), &mut rng, &mut ops).unwrap();
                    let v = s.hom_xor(pk, &diff, &er, &mut ops).unwrap();
                    let got = from_bits_u64(&s.dec(&k.private_part, &v, &mut ops).unwrap());
                    let expected = (a.wrapping_sub(b) & 0xf) ^ r;
                    assert_eq!(got, expected, "a={a} b={b} r={r}");
                    let vp = s.hom_xor_plain(pk, &diff, &word(r, 4), &mut ops).unwrap();
                    assert_eq!(
                        from_bits_u64(&s.dec(&k.private_part, &vp, &mut ops).unwrap()),
                        expected
                    );
                }
            }
        }
    }

    #[test]
    fn ciphertext_wire_format() {
        let (s, k, mut rng) = setup(12);
        let c = s
            .enc(
                &k.public_part,
                &word(0xabc, 12),
                &mut rng,
                &mut OpCounters::default(),
            )
            .unwrap();
        let bytes = s.encode_ciphertext(&c);
        assert_eq!(bytes[0], 12);
        assert_eq!(bytes.len(), 1 + 8 + 8 + 2);
        assert_eq!(s.decode_ciphertext(&bytes).unwrap(), c);
        assert!(s.decode_ciphertext(&bytes[..5]).is_err());
        assert!(s.decode_ciphertext(&[]).is_err());
        let pk = s.decode_public(&s.encode_public(&k.public_part)).unwrap();
        assert_eq!(pk, k.public_part);
    }

    #[test]
    fn backend_flag_parses() {
        assert_eq!(
            "transparent".parse::<HeBackend>().unwrap(),
            HeBackend::Transparent
        );
        assert!("paillier".parse::<HeBackend>().is_err());
    }
}
