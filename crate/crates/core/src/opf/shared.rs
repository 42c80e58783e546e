use num_bigint::BigInt;
use num_traits::{checked_pow, One};

use super::{GeneralOpf, OpfError, PerBitMap};
use crate::bitcore::BitString;
use crate::prg::Keystream;
use crate::scalar::OpfScalar;

pub const DEFAULT_COMPLEMENT_WIDTH: usize = 64;

/// Constants of the shared family `f_i(0) = s`, `f_i(1) = s + k^i·l`, plus
/// the coin `u` and the width inputs are complemented within when `u = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedParams<V> {
    pub s: V,
    pub k: V,
    pub l: V,
    pub u: bool,
    pub complement_width: usize,
}

impl<V: OpfScalar> SharedParams<V> {
    pub fn new(s: V, k: V, l: V) -> Result<Self, OpfError> {
        if k <= V::one() {
            return Err(OpfError::BadParams(format!("k must exceed 1, got {k}")));
        }
        if s < V::one() || l < V::one() {
            return Err(OpfError::BadParams(format!(
                "s and l must be positive, got s={s} l={l}"
            )));
        }
        Ok(SharedParams {
            s,
            k,
            l,
            u: true,
            complement_width: DEFAULT_COMPLEMENT_WIDTH,
        })
    }

    pub fn with_coin(mut self, u: bool) -> Self {
        self.u = u;
        self
    }

    pub fn with_complement_width(mut self, width: usize) -> Self {
        self.complement_width = width;
        self
    }

    /// `(f_i(0), f_i(1))` at 1-based position `i`.
    pub fn map_at(&self, i: usize) -> Result<PerBitMap<V>, OpfError> {
        let ki = checked_pow(self.k.clone(), i).ok_or(OpfError::Overflow)?;
        let one = ki
            .checked_mul(&self.l)
            .and_then(|v| v.checked_add(&self.s))
            .ok_or(OpfError::Overflow)?;
        Ok(PerBitMap::new(self.s.clone(), one))
    }

    /// The first `n` maps as a general OPF.
    pub fn induced(&self, n: usize) -> Result<GeneralOpf<V>, OpfError> {
        Ok(GeneralOpf::new(
            (1..=n).map(|i| self.map_at(i)).collect::<Result<_, _>>()?,
        ))
    }
}

impl SharedParams<BigInt> {
    /// Constants of a few bytes each, as used by the plain protocol.
    pub fn random_standard(rng: &mut Keystream) -> Self {
        let s = rng.in_range(&BigInt::one(), &BigInt::from(0xffff)).unwrap();
        let k = rng.in_range(&BigInt::from(2), &BigInt::from(0xff)).unwrap();
        let l = rng.in_range(&BigInt::one(), &BigInt::from(0xffff)).unwrap();
        SharedParams::new(s, k, l).expect("ranges respect constraints")
    }

    /// Constants for `n`-bit inputs whose lowest gap `k·l` is at least `2^n`:
    /// `s` and `l` have about `n` bits and `k` lies in `[n/2, n]`.
    pub fn random_extension(n: usize, rng: &mut Keystream) -> Self {
        let n = n.max(1);
        let two_n = BigInt::one() << n;
        let s = rng
            .in_range(&(BigInt::one() << (n - 1)), &(&two_n - 1))
            .unwrap();
        let l = rng.in_range(&two_n, &((&two_n << 1) - 1)).unwrap();
        let k = rng
            .in_range(&BigInt::from((n / 2).max(2)), &BigInt::from(n.max(2)))
            .unwrap();
        SharedParams::new(s, k, l).expect("ranges respect constraints")
    }
}

/// `F(x)` over the minimal form of `x`; leading zeros contribute nothing.
pub fn shared_eval<V: OpfScalar>(p: &SharedParams<V>, x: &BitString) -> Result<V, OpfError> {
    let x = x.to_minimal();
    let mut power = V::one();
    let mut total = V::zero();
    for i in 1..=x.width() {
        power = power.checked_mul(&p.k).ok_or(OpfError::Overflow)?;
        let term = if x.bit(i) {
            power
                .checked_mul(&p.l)
                .and_then(|v| v.checked_add(&p.s))
                .ok_or(OpfError::Overflow)?
        } else {
            p.s.clone()
        };
        total = total.checked_add(&term).ok_or(OpfError::Overflow)?;
    }
    Ok(total)
}

/// Bit-length of the largest `F(x)` over `n`-bit inputs,
/// `n·s + (k^(n+1) - k)·l / (k - 1)`.
pub fn shared_output_bits<V: OpfScalar>(p: &SharedParams<V>, n: usize) -> usize {
    assert!(n >= 1, "input length must be positive");
    let (s, k, l) = (p.s.to_bigint(), p.k.to_bigint(), p.l.to_bigint());
    let max: BigInt = BigInt::from(n) * s + (num_traits::pow(k.clone(), n + 1) - &k) * l / (k - 1);
    max.bits() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{to_bits_u64, BitString};
    use crate::opf::validate_general;
    use crate::prg::Seed;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn p352() -> SharedParams<i64> {
        SharedParams::new(3, 2, 5).unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn formula_examples() {
        let p = p352();
        assert_eq!(shared_eval(&p, &bs("101")).unwrap(), 59);
        assert_eq!(shared_eval(&p, &bs("100")).unwrap(), 49);
        assert_eq!(shared_eval(&p, &bs("11")).unwrap(), 36);
        assert!(shared_eval(&p, &bs("100")).unwrap() > shared_eval(&p, &bs("11")).unwrap());
        assert_eq!(shared_eval(&p, &bs("00101")).unwrap(), 59);
    }

    #[test]
    fn agrees_with_induced_general_opf() {
        let p = p352();
        for x in 0..256u64 {
            let bits = to_bits_u64(x, None).unwrap();
            let g = p.induced(bits.width()).unwrap();
            assert_eq!(
                shared_eval(&p, &bits).unwrap(),
                crate::opf::eval(&g, &bits).unwrap()
            );
        }
    }

    #[test]
    fn output_bits_examples() {
        let p = p352();
        assert_eq!(shared_output_bits(&p, 3), 7);
        let brute = (0..8u64)
            .map(|x| shared_eval(&p, &to_bits_u64(x, None).unwrap()).unwrap())
            .max()
            .unwrap();
        assert_eq!(brute, 79);
        // n = 1 collapses to s + k·l.
        assert_eq!(shared_output_bits(&p, 1), bit_len(3 + 10));
    }

    fn bit_len(v: i64) -> usize {
        64 - v.leading_zeros() as usize
    }

    #[test]
    fn output_bits_grow_by_log_k_per_bit() {
        let p = SharedParams::<BigInt>::new(3.into(), 4.into(), 5.into()).unwrap();
        let b = |n| shared_output_bits(&p, n) as f64;
        for n in [8usize, 16, 32] {
            let per_bit = (b(2 * n) - b(n)) / n as f64;
            assert!((per_bit - 2.0).abs() < 0.2, "n={n} slope={per_bit}");
        }
    }

    #[test]
    fn output_bits_match_exhaustive_max() {
        let p = SharedParams::<i64>::new(7, 3, 2).unwrap();
        for n in 1..=10usize {
            let max = (0..1u64 << n)
                .map(|x| shared_eval(&p, &to_bits_u64(x, Some(n)).unwrap()).unwrap())
                .max()
                .unwrap();
            assert_eq!(shared_output_bits(&p, n), bit_len(max));
        }
    }

    #[test]
    fn parameter_constraints() {
        assert!(SharedParams::<i64>::new(3, 1, 5).is_err());
        assert!(SharedParams::<i64>::new(0, 2, 5).is_err());
        assert!(SharedParams::<i64>::new(3, 2, 0).is_err());
    }

    #[test]
    fn map_overflow_is_reported() {
        let p = SharedParams::<i64>::new(1, 2, 1).unwrap();
        assert!(p.map_at(62).is_ok());
        assert_eq!(p.map_at(63), Err(OpfError::Overflow));
    }

    #[test]
    fn random_extension_meets_gap_bound() {
        for n in [1usize, 4, 10, 64] {
            let p =
                SharedParams::random_extension(n, &mut Keystream::new(&Seed::from_u64(n as u64)));
            assert!(&p.k * &p.l >= BigInt::one() << n);
            assert!(p.k >= BigInt::from(2));
        }
        let p = SharedParams::random_standard(&mut Keystream::new(&Seed::from_u64(5)));
        assert!(p.k.to_i64().unwrap() >= 2);
    }

    proptest! {
        #[test]
        fn induced_family_always_validates(s in 1i64..1000, k in 2i64..20, l in 1i64..1000, n in 1usize..10) {
            let p = SharedParams::new(s, k, l).unwrap();
            prop_assert!(validate_general(&p.induced(n).unwrap()).is_valid());
        }

        #[test]
        fn order_survives_unequal_widths(a in 1u32.., b in 1u32.., s in 1i64..50, k in 2i64..6, l in 1i64..50) {
            prop_assume!(a != b);
            let p = SharedParams::new(BigInt::from(s), BigInt::from(k), BigInt::from(l)).unwrap();
            let fa = shared_eval(&p, &to_bits_u64(a as u64, None).unwrap()).unwrap();
            let fb = shared_eval(&p, &to_bits_u64(b as u64, None).unwrap()).unwrap();
            prop_assert_eq!(a > b, fa > fb);
        }
    }
}
