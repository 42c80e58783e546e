//! Reference instances with known outputs.
//!
//! * `TABLE1_MAPS` / `TABLE2_VALUES`: a four-bit general function and its
//!   full evaluation table.
//! * `SAMPLE_*`: a point function anchored at `1001` together with the draws
//!   that produce it, its evaluation table and its rise/fall audit.

use num_bigint::BigInt;

use crate::bitcore::BitString;
use crate::opf::{construct_at_point_injected, GapKind, GeneralOpf, OpfError, PointOpf};

/// `(f_i(0), f_i(1))`, position 1 first.
pub const TABLE1_MAPS: [(i64, i64); 4] = [(3, 5), (7, 10), (1, 8), (4, 18)];

/// Running sums of the gaps of [`TABLE1_MAPS`].
pub const TABLE1_CUMULATIVE: [i64; 4] = [2, 5, 12, 26];

/// `F(x)` for `x = 0000, 0001, ..., 1111`.
pub const TABLE2_VALUES: [i64; 16] = [
    15, 17, 18, 20, 22, 24, 25, 27, 29, 31, 32, 34, 36, 38, 39, 41,
];

pub const SAMPLE_NAME: &str = "paper-3.4.3";
pub const SAMPLE_ANCHOR: &str = "1001";
pub const SAMPLE_L: i64 = 16;
pub const SAMPLE_RANGE: (i64, i64) = (0, 40);

/// `(f_i(b_i), f_i(1 - b_i))` per position, position 1 first.
pub const SAMPLE_DRAWS: [(i64, i64); 4] = [(25, 13), (36, 54), (30, 43), (1, -32)];

/// `(f_i(0), f_i(1))` of the sample, position 1 first.
pub const SAMPLE_MAPS: [(i64, i64); 4] = [(13, 25), (36, 54), (30, 43), (-32, 1)];

/// `F(x)` for `x = 0000, ..., 1111`.
pub const SAMPLE_VALUES: [i64; 16] = [
    47, 59, 65, 77, 60, 72, 78, 90, 80, 92, 98, 110, 93, 105, 111, 123,
];

/// `(position, kind, |gap|)`.
pub const SAMPLE_GAPS: [(usize, GapKind, i64); 4] = [
    (1, GapKind::Fall, 12),
    (2, GapKind::Rise, 18),
    (3, GapKind::Rise, 13),
    (4, GapKind::Fall, 33),
];

pub fn table1() -> GeneralOpf<i64> {
    GeneralOpf::from_pairs(TABLE1_MAPS)
}

pub fn sample_anchor() -> BitString {
    SAMPLE_ANCHOR.parse().expect("valid bit string")
}

pub fn sample_draws() -> Vec<(BigInt, BigInt)> {
    SAMPLE_DRAWS
        .iter()
        .map(|&(x, y)| (BigInt::from(x), BigInt::from(y)))
        .collect()
}

pub fn sample_point() -> Result<PointOpf<BigInt>, OpfError> {
    construct_at_point_injected(
        &sample_anchor(),
        BigInt::from(SAMPLE_L),
        BigInt::from(SAMPLE_RANGE.0),
        BigInt::from(SAMPLE_RANGE.1),
        &sample_draws(),
    )
}
