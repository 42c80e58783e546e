//! Comparison through an untrusted third party.
//!
//! Alice picks `(s, k, l)` and a coin `u`, sends them to Bob, and both
//! submit `F(x)` of the shared function to Ursula. With `u = 0` each party
//! first complements its input within the public width `W`, which reverses
//! the order. Ursula returns the three-way comparison of the two values and
//! the parties undo the reversal when `u = 0`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};

use super::{
    drive, relation_byte, unexpected, Coin, Outcome, ParamSource, ProtocolConfig, ProtocolError,
    Relation,
};
use crate::bitcore::{complement, to_bits, BitString};
use crate::opf::{shared_eval, SharedParams};
use crate::prg::Keystream;
use crate::simnet::{Envelope, Message, OpCounters, Party, PartyId, Transcript};
use crate::wire::{decode_int, encode_int, Reader, Writer};

const PARAMS: &str = "params";
const VALUE: &str = "value";
const RELATION: &str = "relation";

/// The bits a party feeds to `F` under coin `u`.
fn submitted_bits(
    v: &BigUint,
    p: &SharedParams<BigInt>,
    who: &str,
) -> Result<BitString, ProtocolError> {
    if p.u {
        return Ok(to_bits(v, None)?);
    }
    let w = p.complement_width;
    if v.bits() as usize > w {
        return Err(ProtocolError::InputRange {
            value: v.clone(),
            reason: format!("{who}'s input must be below 2^{w} to be complemented"),
        });
    }
    Ok(complement(&to_bits(v, Some(w))?, w)?.to_minimal())
}

fn params_payload(p: &SharedParams<BigInt>) -> Vec<u8> {
    Writer::new()
        .int(&p.s)
        .int(&p.k)
        .int(&p.l)
        .u8(p.u as u8)
        .finish()
}

fn parse_params(payload: &[u8], width: usize) -> Result<SharedParams<BigInt>, ProtocolError> {
    let mut r = Reader::new(payload);
    let s = r.int("s")?;
    let k = r.int("k")?;
    let l = r.int("l")?;
    let u = r.u8("coin")? != 0;
    r.finish()?;
    Ok(SharedParams::new(s, k, l)?
        .with_coin(u)
        .with_complement_width(width))
}

struct Alice {
    a: BigUint,
    source: ParamSource,
    coin: Coin,
    width: usize,
    rng: Keystream,
    params: Option<SharedParams<BigInt>>,
    relation: Option<Relation>,
}

struct Bob {
    b: BigUint,
    width: usize,
    params: Option<SharedParams<BigInt>>,
    relation: Option<Relation>,
}

#[derive(Default)]
struct Ursula {
    values: BTreeMap<PartyId, BigInt>,
    answered: bool,
}

fn final_relation(p: &SharedParams<BigInt>, payload: &[u8]) -> Result<Relation, ProtocolError> {
    let r = relation_byte(payload)?;
    Ok(if p.u { r } else { r.reversed() })
}

impl Party for Alice {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Alice
    }

    fn start(&mut self, _ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        let p = match &self.source {
            ParamSource::Fixed { s, k, l } => SharedParams::new(s.clone(), k.clone(), l.clone())?,
            ParamSource::Standard => SharedParams::random_standard(&mut self.rng),
            ParamSource::Extension { n } => SharedParams::random_extension(*n, &mut self.rng),
        };
        let u = match self.coin {
            Coin::Fixed(u) => u,
            Coin::Flip => self.rng.next_bit(),
        };
        let p = p.with_coin(u).with_complement_width(self.width);
        let value = shared_eval(&p, &submitted_bits(&self.a, &p, "Alice")?)?;
        let out = vec![
            Envelope::new(PartyId::Bob, PARAMS, params_payload(&p)),
            Envelope::new(PartyId::Ursula, VALUE, encode_int(&value)),
        ];
        self.params = Some(p);
        Ok(out)
    }

    fn on_message(
        &mut self,
        msg: &Message,
        _ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        match (msg.label.as_str(), msg.from, &self.params, self.relation) {
            (RELATION, PartyId::Ursula, Some(p), None) => {
                self.relation = Some(final_relation(p, &msg.payload)?);
                Ok(vec![])
            }
            (label, ..) => Err(unexpected(PartyId::Alice, label, "awaiting relation")),
        }
    }

    fn is_terminal(&self) -> bool {
        self.relation.is_some()
    }

    fn state(&self) -> String {
        if self.relation.is_some() {
            "done"
        } else {
            "awaiting relation"
        }
        .into()
    }
}

impl Party for Bob {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Bob
    }

    fn start(&mut self, _ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        Ok(vec![])
    }

    fn on_message(
        &mut self,
        msg: &Message,
        _ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        match (msg.label.as_str(), msg.from, &self.params, self.relation) {
            (PARAMS, PartyId::Alice, None, _) => {
                let p = parse_params(&msg.payload, self.width)?;
                let value = shared_eval(&p, &submitted_bits(&self.b, &p, "Bob")?)?;
                self.params = Some(p);
                Ok(vec![Envelope::new(
                    PartyId::Ursula,
                    VALUE,
                    encode_int(&value),
                )])
            }
            (RELATION, PartyId::Ursula, Some(p), None) => {
                self.relation = Some(final_relation(p, &msg.payload)?);
                Ok(vec![])
            }
            (label, ..) => Err(unexpected(PartyId::Bob, label, self.state_name())),
        }
    }

    fn is_terminal(&self) -> bool {
        self.relation.is_some()
    }

    fn state(&self) -> String {
        self.state_name().into()
    }
}

impl Bob {
    fn state_name(&self) -> &'static str {
        match (&self.params, self.relation) {
            (None, _) => "awaiting params",
            (Some(_), None) => "awaiting relation",
            _ => "done",
        }
    }
}

impl Party for Ursula {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Ursula
    }

    fn start(&mut self, _ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        Ok(vec![])
    }

    fn on_message(
        &mut self,
        msg: &Message,
        _ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        let fresh = matches!(msg.from, PartyId::Alice | PartyId::Bob)
            && !self.values.contains_key(&msg.from);
        if msg.label != VALUE || !fresh {
            return Err(unexpected(PartyId::Ursula, &msg.label, "collecting values"));
        }
        self.values.insert(msg.from, decode_int(&msg.payload)?);
        match (
            self.values.get(&PartyId::Alice),
            self.values.get(&PartyId::Bob),
        ) {
            (Some(x), Some(y)) => {
                let r = Relation::from_ordering(x.cmp(y)).to_byte();
                self.answered = true;
                Ok(vec![
                    Envelope::new(PartyId::Alice, RELATION, vec![r]),
                    Envelope::new(PartyId::Bob, RELATION, vec![r]),
                ])
            }
            _ => Ok(vec![]),
        }
    }

    fn is_terminal(&self) -> bool {
        self.answered
    }

    fn state(&self) -> String {
        format!("holding {} of 2 values", self.values.len())
    }
}

/// Runs Protocol B. The outcome is the three-way relation of `a` to `b`.
pub fn run_protocol_b(
    a: &BigUint,
    b: &BigUint,
    cfg: &ProtocolConfig,
) -> Result<(Outcome, Transcript), ProtocolError> {
    let mut alice = Alice {
        a: a.clone(),
        source: cfg.params.clone(),
        coin: cfg.coin,
        width: cfg.complement_width,
        rng: Keystream::new(&cfg.seeds.alice.derive("protocol-b")),
        params: None,
        relation: None,
    };
    let mut bob = Bob {
        b: b.clone(),
        width: cfg.complement_width,
        params: None,
        relation: None,
    };
    let mut ursula = Ursula::default();
    let t = drive(&mut [&mut alice, &mut bob, &mut ursula])?;
    let (ra, rb) = (
        alice.relation.expect("terminal"),
        bob.relation.expect("terminal"),
    );
    if ra != rb {
        return Err(ProtocolError::Disagreement {
            alice: ra.to_string(),
            bob: rb.to_string(),
        });
    }
    Ok((Outcome::from_relation(ra), t))
}

/// The values Ursula received from `(Alice, Bob)`.
pub fn ursula_inputs(t: &Transcript) -> Option<(BigInt, BigInt)> {
    let from = |p: PartyId| {
        t.messages
            .iter()
            .find(|m| m.from == p && m.to == PartyId::Ursula && m.label == VALUE)
            .and_then(|m| decode_int(&m.payload).ok())
    };
    Some((from(PartyId::Alice)?, from(PartyId::Bob)?))
}

/// What Ursula saw in one run, checked against the constants Alice sent Bob.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewAudit {
    /// Inbound messages carrying exactly one integer, one from each input holder.
    pub inbound_values: usize,
    /// Outbound single-byte relations, one to each input holder.
    pub outbound_results: usize,
    /// Any other message to or from Ursula.
    pub other_messages: usize,
    /// Descriptions of secret constants found in her messages.
    pub leaks: Vec<String>,
}

impl ViewAudit {
    pub fn is_minimal(&self) -> bool {
        self.inbound_values == 2
            && self.outbound_results == 2
            && self.other_messages == 0
            && self.leaks.is_empty()
    }
}

fn contains(hay: &[u8], needle: &[u8]) -> bool {
    hay.windows(needle.len()).any(|w| w == needle)
}

/// Scans Ursula's view for anything beyond the two submitted values and her
/// answers. The constants are read from the `params` message between Alice
/// and Bob. A value message that is itself equal to a constant (e.g.
/// `F(0) = s`) is not counted as a leak; any other occurrence of a
/// constant's encoding is.
pub fn audit_ursula_view(t: &Transcript) -> ViewAudit {
    let secrets: Vec<(&str, Vec<u8>)> = t
        .messages
        .iter()
        .find(|m| m.label == PARAMS && m.to == PartyId::Bob)
        .map(|m| {
            let mut out = vec![("params", m.payload.clone())];
            if let Ok(p) = parse_params(&m.payload, 1) {
                out.push(("s", encode_int(&p.s)));
                out.push(("k", encode_int(&p.k)));
                out.push(("l", encode_int(&p.l)));
            }
            out
        })
        .unwrap_or_default();

    let mut audit = ViewAudit {
        inbound_values: 0,
        outbound_results: 0,
        other_messages: 0,
        leaks: vec![],
    };
    let mut senders = Vec::new();
    let mut receivers = Vec::new();
    for m in t
        .messages
        .iter()
        .filter(|m| m.from == PartyId::Ursula || m.to == PartyId::Ursula)
    {
        let inbound_ok = m.to == PartyId::Ursula
            && m.label == VALUE
            && matches!(m.from, PartyId::Alice | PartyId::Bob)
            && !senders.contains(&m.from)
            && decode_int(&m.payload).is_ok();
        let outbound_ok = m.from == PartyId::Ursula
            && m.label == RELATION
            && matches!(m.to, PartyId::Alice | PartyId::Bob)
            && !receivers.contains(&m.to)
            && relation_byte(&m.payload).is_ok();
        if inbound_ok {
            senders.push(m.from);
            audit.inbound_values += 1;
        } else if outbound_ok {
            receivers.push(m.to);
            audit.outbound_results += 1;
        } else {
            audit.other_messages += 1;
        }
        for (name, enc) in &secrets {
            if contains(&m.payload, enc) && !(inbound_ok && m.payload == *enc) {
                audit
                    .leaks
                    .push(format!("{name} in {:?} from {}", m.label, m.from));
            }
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::oracle;

    fn fixed(u: bool, w: usize) -> ProtocolConfig {
        ProtocolConfig {
            params: ParamSource::Fixed {
                s: 3.into(),
                k: 2.into(),
                l: 5.into(),
            },
            coin: Coin::Fixed(u),
            complement_width: w,
            ..Default::default()
        }
    }

    fn run(a: u64, b: u64, cfg: &ProtocolConfig) -> (Outcome, Transcript) {
        run_protocol_b(&a.into(), &b.into(), cfg).unwrap()
    }

    #[test]
    fn uncomplemented_example() {
        let (o, t) = run(5, 3, &fixed(true, 64));
        assert_eq!(o.relation, Some(Relation::Gt));
        assert_eq!(ursula_inputs(&t).unwrap(), (59.into(), 36.into()));
        assert_eq!(t.messages.len(), 5);
        assert_eq!(t.rounds(), 3);
    }

    #[test]
    fn complemented_example() {
        let (o, t) = run(5, 3, &fixed(false, 4));
        assert_eq!(o.relation, Some(Relation::Gt));
        // 1010 and 1100 under (3, 2, 5).
        let (x, y) = ursula_inputs(&t).unwrap();
        assert_eq!((x.clone(), y.clone()), (112.into(), 132.into()));
        assert!(x < y);
        assert_eq!(
            t.messages.last().unwrap().payload,
            vec![Relation::Lt.to_byte()]
        );
    }

    #[test]
    fn equal_inputs_under_both_coins() {
        for u in [false, true] {
            let (o, _) = run(7, 7, &fixed(u, 8));
            assert_eq!(o.relation, Some(Relation::Eq));
        }
    }

    #[test]
    fn exhaustive_small_inputs() {
        for u in [false, true] {
            let cfg = fixed(u, 6);
            for a in 0..64u64 {
                for b in 0..64u64 {
                    assert_eq!(
                        run(a, b, &cfg).0,
                        oracle(&a.into(), &b.into()),
                        "a={a} b={b} u={u}"
                    );
                }
            }
        }
    }

    #[test]
    fn coin_flips_the_order_ursula_sees() {
        for (a, b) in [(5u64, 3u64), (0, 1), (200, 17), (255, 254)] {
            let (x1, y1) = ursula_inputs(&run(a, b, &fixed(true, 8)).1).unwrap();
            let (x0, y0) = ursula_inputs(&run(a, b, &fixed(false, 8)).1).unwrap();
            assert_eq!(x1.cmp(&y1), y0.cmp(&x0), "a={a} b={b}");
        }
    }

    #[test]
    fn complement_width_is_enforced_only_for_u0() {
        let err = run_protocol_b(&16u32.into(), &1u32.into(), &fixed(false, 4)).unwrap_err();
        assert!(matches!(err, ProtocolError::InputRange { .. }));
        assert!(run_protocol_b(&16u32.into(), &1u32.into(), &fixed(true, 4)).is_ok());
    }

    #[test]
    fn random_parameters_and_coin() {
        let mut coins = [0usize; 2];
        for seed in 0..40u64 {
            let cfg = ProtocolConfig::default().with_seed(&crate::prg::Seed::from_u64(seed));
            let (a, b) = (seed * 7919 % 1000, seed * 104_729 % 1000);
            let (o, t) = run(a, b, &cfg);
            assert_eq!(o, oracle(&a.into(), &b.into()));
            let u = t.messages[0].payload.last().copied().unwrap();
            coins[u as usize] += 1;
        }
        assert!(coins[0] > 5 && coins[1] > 5, "{coins:?}");
    }

    #[test]
    fn extension_parameters() {
        let cfg = ProtocolConfig {
            params: ParamSource::Extension { n: 16 },
            complement_width: 16,
            ..Default::default()
        };
        for (a, b) in [(65535u64, 0u64), (1000, 1001), (4242, 4242)] {
            assert_eq!(run(a, b, &cfg).0, oracle(&a.into(), &b.into()));
        }
    }

    #[test]
    fn ursula_view_is_minimal() {
        for u in [false, true] {
            for (a, b) in [(0u64, 0u64), (5, 3), (250, 251)] {
                let audit = audit_ursula_view(&run(a, b, &fixed(u, 8)).1);
                assert!(audit.is_minimal(), "{audit:?}");
            }
        }
    }

    #[test]
    fn audit_flags_injected_leak() {
        let (_, mut t) = run(5, 3, &fixed(true, 64));
        let params = t.messages[0].payload.clone();
        t.messages[1].payload.extend_from_slice(&params);
        let audit = audit_ursula_view(&t);
        assert!(!audit.is_minimal());
        assert!(audit.leaks.iter().any(|l| l.starts_with("params")));
    }
}
