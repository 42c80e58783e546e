//! Homomorphic sign test.
//!
//! Bob sends `E(b)`; Alice returns `V = (E(a) - E(b)) ⊕ R` for a random
//! `w`-bit mask `R`; Bob decrypts and reports the top bit of `V`; Alice XORs
//! it with the top bit of `R` to get the sign of `(a - b) mod 2^w`, then
//! tells Bob. A zero sign means `a ≥ b`.

use num_bigint::BigUint;

use super::{drive, unexpected, Outcome, ProtocolConfig, ProtocolError};
use crate::bitcore::{msb, to_bits, BitString};
use crate::he::{HeBackend, HomomorphicScheme, SchemeKeys, Transparent};
use crate::prg::Keystream;
use crate::simnet::{Envelope, Message, OpCounters, Party, PartyId, Transcript};
use crate::wire::{Reader, Writer};

pub const LABELS_A: [&str; 4] = ["enc_b", "blinded_v", "msb_bit", "result"];

struct Alice<'s, S: HomomorphicScheme> {
    scheme: &'s S,
    a: BitString,
    rng: Keystream,
    mask: Option<BitString>,
    ge: Option<bool>,
}

struct Bob<'s, S: HomomorphicScheme> {
    scheme: &'s S,
    b: BitString,
    key_seed: crate::prg::Seed,
    rng: Keystream,
    keys: Option<SchemeKeys<S::PublicKey, S::PrivateKey>>,
    sent_bit: bool,
    ge: Option<bool>,
}

impl<S: HomomorphicScheme> Party for Alice<'_, S> {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Alice
    }

    fn start(&mut self, _ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        Ok(vec![])
    }

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        match (msg.label.as_str(), &self.mask) {
            ("enc_b", None) => {
                let mut r = Reader::new(&msg.payload);
                let pk = self.scheme.decode_public(r.blob("public key")?)?;
                let eb = self.scheme.decode_ciphertext(r.blob("ciphertext")?)?;
                r.finish()?;
                let w = self.a.width();
                if self.scheme.width(&pk) != w {
                    return Err(ProtocolError::Config(format!(
                        "key width {} differs from word width {w}",
                        self.scheme.width(&pk)
                    )));
                }
                let ea = self.scheme.enc(&pk, &self.a, &mut self.rng, ops)?;
                let diff = self.scheme.hom_sub(&pk, &ea, &eb, ops)?;
                let mask = to_bits(&self.rng.bits(w), Some(w))?;
                let v = self.scheme.hom_xor_plain(&pk, &diff, &mask, ops)?;
                self.mask = Some(mask);
                Ok(vec![Envelope::new(
                    PartyId::Bob,
                    "blinded_v",
                    self.scheme.encode_ciphertext(&v),
                )])
            }
            ("msb_bit", Some(mask)) if self.ge.is_none() => {
                let t = match msg.payload.as_slice() {
                    [0] => false,
                    [1] => true,
                    _ => return Err(ProtocolError::BadRelation(msg.payload[0])),
                };
                let sign = t ^ msb(mask);
                self.ge = Some(!sign);
                Ok(vec![Envelope::new(
                    PartyId::Bob,
                    "result",
                    vec![!sign as u8],
                )])
            }
            (label, _) => Err(unexpected(PartyId::Alice, label, self.state_name())),
        }
    }

    fn is_terminal(&self) -> bool {
        self.ge.is_some()
    }

    fn state(&self) -> String {
        self.state_name().into()
    }
}

impl<S: HomomorphicScheme> Alice<'_, S> {
    fn state_name(&self) -> &'static str {
        match (&self.mask, self.ge) {
            (None, _) => "awaiting enc_b",
            (Some(_), None) => "awaiting msb_bit",
            (Some(_), Some(_)) => "done",
        }
    }
}

impl<S: HomomorphicScheme> Party for Bob<'_, S> {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Bob
    }

    fn start(&mut self, ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        let keys = self.scheme.keygen(self.b.width(), &self.key_seed)?;
        let eb = self
            .scheme
            .enc(&keys.public_part, &self.b, &mut self.rng, ops)?;
        let payload = Writer::new()
            .blob(&self.scheme.encode_public(&keys.public_part))
            .blob(&self.scheme.encode_ciphertext(&eb))
            .finish();
        self.keys = Some(keys);
        Ok(vec![Envelope::new(PartyId::Alice, "enc_b", payload)])
    }

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        match (msg.label.as_str(), self.sent_bit, self.ge) {
            ("blinded_v", false, _) => {
                let keys = self.keys.as_ref().expect("keys exist after start");
                let v = self.scheme.decode_ciphertext(&msg.payload)?;
                let plain = self.scheme.dec(&keys.private_part, &v, ops)?;
                self.sent_bit = true;
                Ok(vec![Envelope::new(
                    PartyId::Alice,
                    "msb_bit",
                    vec![msb(&plain) as u8],
                )])
            }
            ("result", true, None) => {
                match msg.payload.as_slice() {
                    [x @ (0 | 1)] => self.ge = Some(*x == 1),
                    _ => return Err(ProtocolError::BadRelation(msg.payload[0])),
                }
                Ok(vec![])
            }
            (label, _, _) => Err(unexpected(PartyId::Bob, label, self.state_name())),
        }
    }

    fn is_terminal(&self) -> bool {
        self.ge.is_some()
    }

    fn state(&self) -> String {
        self.state_name().into()
    }
}

impl<S: HomomorphicScheme> Bob<'_, S> {
    fn state_name(&self) -> &'static str {
        match (self.sent_bit, self.ge) {
            (false, _) => "awaiting blinded_v",
            (true, None) => "awaiting result",
            (true, Some(_)) => "done",
        }
    }
}

fn word(v: &BigUint, w: usize, who: &str) -> Result<BitString, ProtocolError> {
    if v.bits() as usize >= w {
        return Err(ProtocolError::InputRange {
            value: v.clone(),
            reason: format!("{who}'s input must be below 2^{} for word width {w}", w - 1),
        });
    }
    Ok(to_bits(v, Some(w))?)
}

/// Runs Protocol A with an explicit scheme.
pub fn run_protocol_a_with<S: HomomorphicScheme>(
    scheme: &S,
    a: &BigUint,
    b: &BigUint,
    cfg: &ProtocolConfig,
) -> Result<(Outcome, Transcript), ProtocolError> {
    let w = cfg.width;
    if w < 2 {
        return Err(ProtocolError::Config(format!(
            "word width must be at least 2, got {w}"
        )));
    }
    let mut alice = Alice {
        scheme,
        a: word(a, w, "Alice")?,
        rng: Keystream::new(&cfg.seeds.alice.derive("protocol-a")),
        mask: None,
        ge: None,
    };
    let mut bob = Bob {
        scheme,
        b: word(b, w, "Bob")?,
        key_seed: cfg.seeds.bob.derive("he"),
        rng: Keystream::new(&cfg.seeds.bob.derive("protocol-a")),
        keys: None,
        sent_bit: false,
        ge: None,
    };
    let t = drive(&mut [&mut alice, &mut bob])?;
    let (ga, gb) = (alice.ge.expect("terminal"), bob.ge.expect("terminal"));
    if ga != gb {
        return Err(ProtocolError::Disagreement {
            alice: ga.to_string(),
            bob: gb.to_string(),
        });
    }
    Ok((Outcome::from_ge(ga), t))
}

/// Runs Protocol A with the configured backend. Reports `a ≥ b`; equality is
/// left unresolved.
pub fn run_protocol_a(
    a: &BigUint,
    b: &BigUint,
    cfg: &ProtocolConfig,
) -> Result<(Outcome, Transcript), ProtocolError> {
    match cfg.he_backend {
        HeBackend::Transparent => run_protocol_a_with(&Transparent, a, b, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{oracle, Relation};
    use crate::simnet::OpTag;

    fn cfg(w: usize) -> ProtocolConfig {
        ProtocolConfig {
            width: w,
            ..Default::default()
        }
    }

    fn run(a: u64, b: u64, w: usize) -> (Outcome, Transcript) {
        run_protocol_a(&a.into(), &b.into(), &cfg(w)).unwrap()
    }

    #[test]
    fn examples() {
        assert!(run(5, 3, 8).0.predicate_ge);
        let (o, _) = run(3, 5, 8);
        assert!(!o.predicate_ge);
        assert_eq!(o.relation, Some(Relation::Lt));
        let (o, _) = run(7, 7, 8);
        assert!(o.predicate_ge);
        assert_eq!(o.relation, None);
        assert_eq!(o.predicate_gt, None);
    }

    #[test]
    fn message_flow_and_counters() {
        let (_, t) = run(100, 27, 8);
        assert_eq!(t.labels(), LABELS_A.to_vec());
        assert_eq!(t.messages.len(), 4);
        assert_eq!(t.rounds(), 4);
        let c = &t.counters;
        assert_eq!(
            [OpTag::Enc, OpTag::HomSub, OpTag::HomXor, OpTag::Dec].map(|g| c.get(g)),
            [2, 1, 1, 1]
        );
        assert_eq!(c.get(OpTag::OtEnc) + c.get(OpTag::OtDec), 0);
        let from: Vec<PartyId> = t.messages.iter().map(|m| m.from).collect();
        assert_eq!(
            from,
            vec![PartyId::Bob, PartyId::Alice, PartyId::Bob, PartyId::Alice]
        );
        assert_eq!(t.messages[3].payload.len(), 1);
    }

    #[test]
    fn exhaustive_small_width() {
        for a in 0..32u64 {
            for b in 0..32u64 {
                let (o, _) = run(a, b, 6);
                assert_eq!(o.predicate_ge, a >= b, "a={a} b={b}");
                assert!(o.consistent_with(&oracle(&a.into(), &b.into())));
            }
        }
    }

    #[test]
    fn range_checks() {
        let err = run_protocol_a(&300u32.into(), &1u32.into(), &cfg(8)).unwrap_err();
        assert!(matches!(err, ProtocolError::InputRange { .. }));
        assert!(run_protocol_a(&128u32.into(), &1u32.into(), &cfg(8)).is_err());
        assert!(run_protocol_a(&127u32.into(), &1u32.into(), &cfg(8)).is_ok());
        assert!(matches!(
            run_protocol_a(&0u32.into(), &0u32.into(), &cfg(1)),
            Err(ProtocolError::Config(_))
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let (_, t1) = run(9, 4, 16);
        let (_, t2) = run(9, 4, 16);
        assert_eq!(t1, t2);
    }
}
