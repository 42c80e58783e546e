//! The three comparison protocols as party state machines over [`simnet`].
//!
//! | protocol | parties           | primitive                          |
//! |----------|-------------------|------------------------------------|
//! | A        | Alice, Bob        | homomorphic subtraction and XOR    |
//! | B        | Alice, Bob, Ursula| shared order-preserving function   |
//! | C        | Alice, Bob        | point function + per-bit transfers |
//!
//! Every run is deterministic given the configured seeds.
//!
//! [`simnet`]: crate::simnet

mod a;
mod b;
mod c;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitcore::BitError;
use crate::he::{HeBackend, HeError};
use crate::opf::{OpfError, DEFAULT_COMPLEMENT_WIDTH};
use crate::ot::{OtBackend, OtError, DEFAULT_MODULUS_BITS};
use crate::prg::Seed;
use crate::simnet::{self, Party, PartyId, SimError, Transcript};
use crate::wire::WireError;

pub use a::{run_protocol_a, run_protocol_a_with, LABELS_A};
pub use b::{audit_ursula_view, run_protocol_b, ursula_inputs, ViewAudit};
pub use c::run_protocol_c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "LT")]
    Lt,
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "GT")]
    Gt,
}

impl Relation {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Relation::Lt,
            Ordering::Equal => Relation::Eq,
            Ordering::Greater => Relation::Gt,
        }
    }

    /// Swaps `Lt` and `Gt`; `Eq` is fixed.
    pub fn reversed(self) -> Self {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Eq => Relation::Eq,
            Relation::Gt => Relation::Lt,
        }
    }

    pub fn to_byte(self) -> u8 {
        match self {
            Relation::Lt => 0,
            Relation::Eq => 1,
            Relation::Gt => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Relation::Lt),
            1 => Some(Relation::Eq),
            2 => Some(Relation::Gt),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "LT",
            Relation::Eq => "EQ",
            Relation::Gt => "GT",
        })
    }
}

/// Result of one comparison of Alice's `a` against Bob's `b`.
///
/// `relation` is `None` only when a run can tell `a ≥ b` but not whether the
/// inputs are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub relation: Option<Relation>,
    pub predicate_gt: Option<bool>,
    pub predicate_ge: bool,
}

impl Outcome {
    pub fn from_relation(r: Relation) -> Self {
        Outcome {
            relation: Some(r),
            predicate_gt: Some(r == Relation::Gt),
            predicate_ge: r != Relation::Lt,
        }
    }

    /// Only the sign of `a - b` is known.
    pub fn from_ge(ge: bool) -> Self {
        if ge {
            Outcome {
                relation: None,
                predicate_gt: None,
                predicate_ge: true,
            }
        } else {
            Outcome::from_relation(Relation::Lt)
        }
    }

    /// `GT`, `LT`, `EQ`, or `GE` when equality is unresolved.
    pub fn label(&self) -> &'static str {
        match self.relation {
            Some(Relation::Gt) => "GT",
            Some(Relation::Lt) => "LT",
            Some(Relation::Eq) => "EQ",
            None => "GE",
        }
    }

    /// Process exit status: 0 for GT (and unresolved GE), 1 for LT, 2 for EQ.
    pub fn exit_code(&self) -> i32 {
        match self.relation {
            Some(Relation::Gt) | None => 0,
            Some(Relation::Lt) => 1,
            Some(Relation::Eq) => 2,
        }
    }

    /// Whether everything this outcome claims holds for `truth`.
    pub fn consistent_with(&self, truth: &Outcome) -> bool {
        let rel_ok = self.relation.is_none_or(|r| Some(r) == truth.relation);
        let gt_ok = self
            .predicate_gt
            .is_none_or(|g| Some(g) == truth.predicate_gt);
        rel_ok && gt_ok && self.predicate_ge == truth.predicate_ge
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain struct serializes")
    }
}

/// Plaintext three-way comparison.
pub fn oracle(a: &BigUint, b: &BigUint) -> Outcome {
    Outcome::from_relation(Relation::from_ordering(a.cmp(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    A,
    B,
    /// Protocol B with constants sized for `n`-bit inputs.
    BExt,
    C,
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Protocol::A),
            "b" => Ok(Protocol::B),
            "b-ext" => Ok(Protocol::BExt),
            "c" => Ok(Protocol::C),
            other => Err(format!(
                "unknown protocol {other:?} (expected a, b, b-ext or c)"
            )),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::A => "a",
            Protocol::B => "b",
            Protocol::BExt => "b-ext",
            Protocol::C => "c",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds {
    pub alice: Seed,
    pub bob: Seed,
    pub ursula: Seed,
}

impl Seeds {
    pub fn from_master(master: &Seed) -> Self {
        Seeds {
            alice: master.derive("alice"),
            bob: master.derive("bob"),
            ursula: master.derive("ursula"),
        }
    }
}

/// Where Protocol B's constants come from. Alice draws the random ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamSource {
    Fixed {
        s: BigInt,
        k: BigInt,
        l: BigInt,
    },
    /// A few bytes each.
    Standard,
    /// `k·l ≥ 2^n` for `n`-bit inputs.
    Extension {
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coin {
    Fixed(bool),
    /// Drawn from Alice's seed.
    Flip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolConfig {
    pub seeds: Seeds,
    /// Protocol A word size.
    pub width: usize,
    pub he_backend: HeBackend,
    pub params: ParamSource,
    pub coin: Coin,
    pub complement_width: usize,
    /// Protocol C input bound in bits.
    pub d: usize,
    pub point_l: BigInt,
    pub point_range: (BigInt, BigInt),
    /// Explicit point-function draws instead of seeded ones.
    pub point_draws: Option<Vec<(BigInt, BigInt)>>,
    pub ot_backend: OtBackend,
    pub ot_modulus_bits: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            seeds: Seeds::from_master(&Seed::from_u64(1)),
            width: 32,
            he_backend: HeBackend::Transparent,
            params: ParamSource::Standard,
            coin: Coin::Flip,
            complement_width: DEFAULT_COMPLEMENT_WIDTH,
            d: 32,
            point_l: BigInt::from(256),
            point_range: (BigInt::from(0), BigInt::from(256)),
            point_draws: None,
            ot_backend: OtBackend::Transparent,
            ot_modulus_bits: DEFAULT_MODULUS_BITS,
        }
    }
}

impl ProtocolConfig {
    pub fn with_seed(mut self, master: &Seed) -> Self {
        self.seeds = Seeds::from_master(master);
        self
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("input {value} out of range: {reason}")]
    InputRange { value: BigUint, reason: String },
    #[error(transparent)]
    He(#[from] HeError),
    #[error(transparent)]
    Ot(#[from] OtError),
    #[error(transparent)]
    Opf(#[from] OpfError),
    #[error(transparent)]
    Bits(#[from] BitError),
    #[error("malformed message: {0}")]
    Wire(#[from] WireError),
    #[error("{party} got unexpected {label:?} while {state}")]
    Unexpected {
        party: PartyId,
        label: String,
        state: &'static str,
    },
    #[error("invalid relation byte {0}")]
    BadRelation(u8),
    #[error("parties disagree on the result: alice {alice}, bob {bob}")]
    Disagreement { alice: String, bob: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("message exchange failed: {0}")]
    Network(String),
}

pub(crate) fn unexpected(party: PartyId, label: &str, state: &'static str) -> ProtocolError {
    ProtocolError::Unexpected {
        party,
        label: label.to_string(),
        state,
    }
}

pub(crate) fn drive(
    parties: &mut [&mut dyn Party<Error = ProtocolError>],
) -> Result<Transcript, ProtocolError> {
    simnet::run(parties, None).map_err(|e| match e {
        SimError::Party { source, .. } => source,
        other => ProtocolError::Network(other.to_string()),
    })
}

pub(crate) fn relation_byte(payload: &[u8]) -> Result<Relation, ProtocolError> {
    match payload {
        [b] => Relation::from_byte(*b).ok_or(ProtocolError::BadRelation(*b)),
        _ => Err(ProtocolError::Wire(WireError::Trailing(
            payload.len().saturating_sub(1),
        ))),
    }
}

/// Runs `protocol` on `(a, b)`. `BExt` derives its constants for inputs of
/// `cfg.width` bits.
pub fn run_protocol(
    protocol: Protocol,
    a: &BigUint,
    b: &BigUint,
    cfg: &ProtocolConfig,
) -> Result<(Outcome, Transcript), ProtocolError> {
    match protocol {
        Protocol::A => run_protocol_a(a, b, cfg),
        Protocol::B => run_protocol_b(a, b, cfg),
        Protocol::BExt => {
            let cfg = ProtocolConfig {
                params: ParamSource::Extension { n: cfg.width },
                ..cfg.clone()
            };
            run_protocol_b(a, b, &cfg)
        }
        Protocol::C => run_protocol_c(a, b, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle(&big(5), &big(3)).relation, Some(Relation::Gt));
        assert_eq!(oracle(&big(3), &big(5)).relation, Some(Relation::Lt));
        assert_eq!(oracle(&big(7), &big(7)).relation, Some(Relation::Eq));
    }

    #[test]
    fn outcome_invariants() {
        for r in [Relation::Lt, Relation::Eq, Relation::Gt] {
            let o = Outcome::from_relation(r);
            assert_eq!(o.predicate_gt, Some(r == Relation::Gt));
            assert_eq!(o.predicate_ge, matches!(r, Relation::Gt | Relation::Eq));
            assert_eq!(Relation::from_byte(r.to_byte()), Some(r));
            assert_eq!(r.reversed().reversed(), r);
        }
        let ge = Outcome::from_ge(true);
        assert!(ge.consistent_with(&Outcome::from_relation(Relation::Eq)));
        assert!(ge.consistent_with(&Outcome::from_relation(Relation::Gt)));
        assert!(!ge.consistent_with(&Outcome::from_relation(Relation::Lt)));
        assert_eq!(ge.label(), "GE");
        assert_eq!(
            serde_json::to_value(Outcome::from_relation(Relation::Gt)).unwrap(),
            serde_json::json!({"relation": "GT", "predicate_gt": true, "predicate_ge": true})
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome::from_relation(Relation::Gt).exit_code(), 0);
        assert_eq!(Outcome::from_relation(Relation::Lt).exit_code(), 1);
        assert_eq!(Outcome::from_relation(Relation::Eq).exit_code(), 2);
    }

    #[test]
    fn protocol_names() {
        for p in [Protocol::A, Protocol::B, Protocol::BExt, Protocol::C] {
            assert_eq!(p.to_string().parse::<Protocol>().unwrap(), p);
        }
        assert!("d".parse::<Protocol>().is_err());
    }
}
