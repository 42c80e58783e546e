//! Two-party integer comparison ("who is richer?") over a simulated network.
//!
//! Three protocols are provided in [`protocols`]:
//!
//! * **A**: homomorphic subtraction and XOR blinding reveal the sign of
//!   `a - b`.
//! * **B**: both parties map their inputs through a shared order-preserving
//!   function and a third party compares the images.
//! * **C**: Bob builds a function that preserves order around his own input;
//!   Alice evaluates it on hers through per-bit oblivious transfer.
//!
//! Building blocks live in their own modules: bit strings ([`bitcore`]),
//! a seeded generator ([`prg`]), the message network ([`simnet`]),
//! homomorphic words ([`he`]), oblivious transfer ([`ot`]) and the
//! order-preserving functions ([`opf`]). [`harness`] drives sweeps,
//! benchmarks and table reproduction.
//!
//! The order-preserving functions are generic over [`scalar::OpfScalar`];
//! the aliases below fix the common choices.

pub mod bitcore;
pub mod fixtures;
pub mod harness;
pub mod he;
pub mod opf;
pub mod ot;
pub mod prg;
pub mod protocols;
pub mod scalar;
pub mod simnet;
pub mod wire;

pub use num_bigint::{BigInt, BigUint};

/// Arbitrary-precision general function.
pub type BigGeneralOpf = opf::GeneralOpf<BigInt>;
/// Arbitrary-precision point function.
pub type BigPointOpf = opf::PointOpf<BigInt>;
/// Arbitrary-precision shared constants.
pub type BigSharedParams = opf::SharedParams<BigInt>;

/// Machine-word variants; arithmetic reports overflow instead of wrapping.
pub type WordGeneralOpf = opf::GeneralOpf<i64>;
pub type WordPointOpf = opf::PointOpf<i64>;
pub type WordSharedParams = opf::SharedParams<i64>;
