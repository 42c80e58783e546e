//! Small RSA keys for the commutative transfer backend.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::OtError;
use crate::prg::{Keystream, Seed};

pub const PUBLIC_EXPONENT: u32 = 65_537;
pub const MIN_MODULUS_BITS: usize = 256;
pub const DEFAULT_MODULUS_BITS: usize = 512;

#[derive(Clone, PartialEq, Eq)]
pub struct RsaKey {
    pub n: BigUint,
    pub e: BigUint,
    d: BigUint,
    p: BigUint,
    q: BigUint,
    dp: BigUint,
    dq: BigUint,
    q_inv: BigUint,
}

impl std::fmt::Debug for RsaKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RsaKey")
            .field("n", &self.n)
            .field("e", &self.e)
            .finish_non_exhaustive()
    }
}

impl RsaKey {
    /// Deterministic key of `bits` bits (two primes of `bits/2` each) drawn
    /// from the keystream of `seed`.
    pub fn generate(seed: &Seed, bits: usize) -> Result<Self, OtError> {
        if bits < MIN_MODULUS_BITS || !bits.is_multiple_of(2) {
            return Err(OtError::ModulusBits(bits));
        }
        let mut rng = Keystream::new(seed);
        let e = BigUint::from(PUBLIC_EXPONENT);
        loop {
            let p = glass_pumpkin::prime::from_rng(bits / 2, &mut rng)
                .map_err(|err| OtError::KeyGen(err.to_string()))?;
            let q = glass_pumpkin::prime::from_rng(bits / 2, &mut rng)
                .map_err(|err| OtError::KeyGen(err.to_string()))?;
            if p == q {
                continue;
            }
            let n = &p * &q;
            if n.bits() as usize != bits {
                continue;
            }
            let phi = (&p - 1u32) * (&q - 1u32);
            let Some(d) = e.modinv(&phi) else {
                continue;
            };
            let dp = &d % (&p - 1u32);
            let dq = &d % (&q - 1u32);
            let Some(q_inv) = q.modinv(&p) else {
                continue;
            };
            return Ok(RsaKey {
                n,
                e,
                d,
                p,
                q,
                dp,
                dq,
                q_inv,
            });
        }
    }

    /// Same as [`RsaKey::generate`], memoized per `(seed, bits)`.
    pub fn cached(seed: &Seed, bits: usize) -> Result<Arc<Self>, OtError> {
        type Cache = Mutex<HashMap<(Vec<u8>, usize), Arc<RsaKey>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (seed.as_bytes().to_vec(), bits);
        if let Some(k) = cache.lock().expect("key cache poisoned").get(&key) {
            return Ok(Arc::clone(k));
        }
        let fresh = Arc::new(Self::generate(seed, bits)?);
        cache
            .lock()
            .expect("key cache poisoned")
            .insert(key, Arc::clone(&fresh));
        Ok(fresh)
    }

    pub fn bits(&self) -> usize {
        self.n.bits() as usize
    }

    pub fn encrypt(&self, m: &BigUint) -> BigUint {
        m.modpow(&self.e, &self.n)
    }

    /// Private exponentiation via the Chinese remainder theorem.
    pub fn decrypt(&self, c: &BigUint) -> BigUint {
        let m1 = (c % &self.p).modpow(&self.dp, &self.p);
        let m2 = (c % &self.q).modpow(&self.dq, &self.q);
        let diff = (&m1 + &self.p - (&m2 % &self.p)) % &self.p;
        let h = (&self.q_inv * diff) % &self.p;
        m2 + h * &self.q
    }

    /// Unoptimized private exponentiation, kept for cross-checking.
    pub fn decrypt_plain(&self, c: &BigUint) -> BigUint {
        c.modpow(&self.d, &self.n)
    }

    pub fn is_consistent(&self) -> bool {
        let phi = (&self.p - 1u32) * (&self.q - 1u32);
        (&self.e * &self.d).mod_floor(&phi).is_one() && &self.p * &self.q == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_deterministic_and_sized() {
        let s = Seed::from_u64(11);
        let k1 = RsaKey::generate(&s, 256).unwrap();
        let k2 = RsaKey::generate(&s, 256).unwrap();
        assert_eq!(k1, k2);
        assert_eq!(k1.bits(), 256);
        assert!(k1.is_consistent());
        let k3 = RsaKey::generate(&Seed::from_u64(12), 256).unwrap();
        assert_ne!(k1.n, k3.n);
    }

    #[test]
    fn crt_matches_plain_exponentiation() {
        let k = RsaKey::cached(&Seed::from_u64(5), 512).unwrap();
        let mut rng = Keystream::new(&Seed::from_u64(6));
        for _ in 0..20 {
            let m = rng.below(&k.n);
            let c = k.encrypt(&m);
            assert_eq!(k.decrypt(&c), m);
            assert_eq!(k.decrypt_plain(&c), m);
        }
    }

    #[test]
    fn modulus_size_limits() {
        let s = Seed::from_u64(1);
        assert_eq!(
            RsaKey::generate(&s, 128).unwrap_err(),
            OtError::ModulusBits(128)
        );
        assert_eq!(
            RsaKey::generate(&s, 257).unwrap_err(),
            OtError::ModulusBits(257)
        );
    }

    #[test]
    fn cache_returns_shared_key() {
        let s = Seed::from_u64(77);
        let a = RsaKey::cached(&s, 256).unwrap();
        let b = RsaKey::cached(&s, 256).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
